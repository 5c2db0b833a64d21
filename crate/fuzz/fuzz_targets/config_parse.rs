#![no_main]
use libfuzzer_sys::fuzz_target;
use pdee::experiments::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ExperimentConfig::from_toml_str(text) else { return };
    if config.validate().is_ok() {
        let again = ExperimentConfig::from_toml_str(&config.to_toml()).expect("re-parse");
        assert_eq!(again, config);
    }
});
