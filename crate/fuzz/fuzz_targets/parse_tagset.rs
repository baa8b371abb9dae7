#![no_main]

use libfuzzer_sys::fuzz_target;
use speech_repair::tagger::parse_tagset;

fuzz_target!(|data: &str| {
    if let Ok(tags) = parse_tagset(data) {
        assert_eq!(parse_tagset(&tags.join("\n")).expect("tag list reparses"), tags);
    }
});
