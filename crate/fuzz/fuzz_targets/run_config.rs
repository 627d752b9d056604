#![no_main]

use libfuzzer_sys::fuzz_target;
use param_elliptic_cli::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = serde_json::from_slice::<RunConfig>(data) {
        if cfg.validate().is_ok() {
            let _ = cfg.operator();
            let _ = cfg.ch_config();
            let _ = cfg.boundary_grid();
        }
    }
});
