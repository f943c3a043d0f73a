#![no_main]
use libfuzzer_sys::fuzz_target;
use photon_exchange::pipeline::io::{parse_count_records, write_count_records};

fuzz_target!(|data: &[u8]| {
    let Ok(records) = parse_count_records(data) else { return };
    assert!(records.windows(2).all(|w| w[0].delay < w[1].delay));
    // whatever parses must survive a write/read round trip
    let mut buf = Vec::new();
    write_count_records(&mut buf, &records).unwrap();
    assert_eq!(parse_count_records(&buf).unwrap(), records);
});
