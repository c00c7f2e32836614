#![no_main]

use libfuzzer_sys::fuzz_target;
use phtorus::config::MapDefinition;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(def) = MapDefinition::parse(text) {
        let _ = def.validated_map();
    }
});
