#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = photon_exchange_cli::parse_config(data) {
        let delays = config.delays().unwrap();
        assert!(!delays.is_empty());
        config.params().unwrap();
    }
});
