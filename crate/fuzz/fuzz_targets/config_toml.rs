#![no_main]

use libfuzzer_sys::fuzz_target;
use speech_repair::corpus::SynthSpec;
use speech_repair::Config;

fuzz_target!(|data: &str| {
    if let Ok(c) = Config::from_toml(data) {
        Config::from_toml(&c.to_toml()).expect("written config loads");
    }
    let _ = SynthSpec::from_toml(data);
});
