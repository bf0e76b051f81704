#![no_main]

use libfuzzer_sys::fuzz_target;
use ris_core::channel::{read_channel_csv, write_channel_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(ch) = read_channel_csv(data) {
        let mut buf = Vec::new();
        write_channel_csv(&ch, &mut buf).expect("write succeeds");
        let back = read_channel_csv(buf.as_slice()).expect("written channels parse");
        assert_eq!(back.num_cells(), ch.num_cells());
    }
});
