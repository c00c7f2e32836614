#![no_main]

use libfuzzer_sys::fuzz_target;
use phtorus::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::parse(text) {
        // Accessors must not panic on anything that validated.
        let _ = cfg.map_definition();
        let _ = cfg.strip_map();
        let _ = cfg.hunt_options();
        let _ = cfg.growth_options();
    }
});
