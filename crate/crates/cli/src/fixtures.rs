//! Fixture scenarios shipped inside the binary, so `verify --suite figures`
//! works from any directory.

const FILES: &[(&str, &str, &str)] = &[
    ("server_error", "server_error.model", include_str!("../fixtures/server_error/server_error.model")),
    ("server_error", "log.action", include_str!("../fixtures/server_error/log.action")),
    ("server_error", "dedicto.action", include_str!("../fixtures/server_error/dedicto.action")),
    ("server_error", "dere.action", include_str!("../fixtures/server_error/dere.action")),
    ("server_error", "fired.action", include_str!("../fixtures/server_error/fired.action")),
    (
        "server_error",
        "server_error.scenario",
        include_str!("../fixtures/server_error/server_error.scenario"),
    ),
    ("thieves", "thieves.model", include_str!("../fixtures/thieves/thieves.model")),
    ("thieves", "criminal.action", include_str!("../fixtures/thieves/criminal.action")),
    ("thieves", "reveal.action", include_str!("../fixtures/thieves/reveal.action")),
    ("thieves", "thieves.scenario", include_str!("../fixtures/thieves/thieves.scenario")),
];

/// Fixture directories, each with a `<name>.scenario`.
pub const SCENARIOS: &[&str] = &["server_error", "thieves"];

pub fn get(dir: &str, file: &str) -> Option<&'static str> {
    FILES
        .iter()
        .find(|(d, f, _)| *d == dir && *f == file)
        .map(|(_, _, text)| *text)
}

/// Loader for [`crate::scenario::run_scenario`].
pub fn read(dir: &str, file: &str) -> Result<String, String> {
    get(dir, file)
        .map(str::to_string)
        .ok_or_else(|| format!("no fixture `{dir}/{file}`"))
}

pub fn scenario(dir: &str) -> &'static str {
    get(dir, &format!("{dir}.scenario")).expect("every fixture directory has a scenario")
}
