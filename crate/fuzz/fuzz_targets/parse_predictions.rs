#![no_main]

use libfuzzer_sys::fuzz_target;
use speech_repair::eval::{parse_predictions, prediction_line};

fuzz_target!(|data: &str| {
    if let Ok(map) = parse_predictions(data) {
        let text: String = map
            .iter()
            .flat_map(|(id, ps)| ps.iter().map(move |p| prediction_line(id, p) + "\n"))
            .collect();
        assert_eq!(parse_predictions(&text).expect("written predictions parse"), map);
    }
});
