#![no_main]

use libfuzzer_sys::fuzz_target;
use param_elliptic::symbols::{BoundarySymbol, DifferentialSymbol};
use param_elliptic_cli::config::Operator;

fuzz_target!(|data: &[u8]| {
    if let Ok(a) = serde_json::from_slice::<DifferentialSymbol>(data) {
        let back: DifferentialSymbol = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
        let xi = vec![0.5; a.dim()];
        let _ = a.eval_symbol(&xi, true);
    }
    if let Ok(b) = serde_json::from_slice::<BoundarySymbol>(data) {
        let back: BoundarySymbol = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(b, back);
    }
    let _ = serde_json::from_slice::<Operator>(data);
});
