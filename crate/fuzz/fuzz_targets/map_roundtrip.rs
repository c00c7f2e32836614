#![no_main]

use libfuzzer_sys::fuzz_target;
use phtorus::config::MapDefinition;

// Any map definition that parses must survive serialisation unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(def) = MapDefinition::parse(text) else {
        return;
    };
    let json = def.to_json().expect("parsed definitions serialise");
    let back = MapDefinition::parse(&json).expect("serialised definitions parse");
    assert_eq!(back, def);
});
