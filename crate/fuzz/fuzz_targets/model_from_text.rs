#![no_main]

use libfuzzer_sys::fuzz_target;
use speech_repair::TaggerModel;

fuzz_target!(|data: &str| {
    if let Ok(m) = TaggerModel::from_text(data) {
        let again = TaggerModel::from_text(&m.to_text()).expect("written model loads");
        assert_eq!(again.tagset, m.tagset);
        assert_eq!(again.vocab, m.vocab);
    }
});
