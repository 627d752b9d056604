#![no_main]

use libfuzzer_sys::fuzz_target;
use param_elliptic::io::{decode_field, decode_grid_field, encode_field};

fuzz_target!(|data: &[u8]| {
    if let Ok((header, values)) = decode_field(data) {
        let bytes = encode_field(&header, &values).unwrap();
        let (h2, v2) = decode_field(&bytes).unwrap();
        assert_eq!(header, h2);
        assert_eq!(values.len(), v2.len());
    }
    let _ = decode_grid_field(data);
});
