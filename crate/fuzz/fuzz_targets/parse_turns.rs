#![no_main]

use libfuzzer_sys::fuzz_target;
use speech_repair::corpus::{parse_turns, serialize_turns};

fuzz_target!(|data: &str| {
    if let Ok(turns) = parse_turns(data) {
        let again = parse_turns(&serialize_turns(&turns)).expect("serialized corpus parses");
        assert_eq!(again, turns);
        for t in &turns {
            let _ = t.gold_repairs();
        }
    }
});
