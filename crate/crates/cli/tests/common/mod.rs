#![allow(dead_code)]

use lubrimortar_cli::artifacts::ProfileRow;
use lubrimortar_cli::config::{resolve, Config, Scenario};

/// Normal load of the pin fixture [N/mm].
pub const PIN_LOAD: f64 = 1e-5;

pub fn config(scenario: Scenario, overrides: &[&str]) -> Config {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    resolve(None, Some(scenario), &o).unwrap()
}

pub fn pin_config(scenario: Scenario, overrides: &[&str]) -> Config {
    let load = format!("pin.load={PIN_LOAD}");
    let mut o = vec![load.as_str()];
    o.extend_from_slice(overrides);
    config(scenario, &o)
}

/// Profile rows ordered by abscissa.
pub fn by_x(rows: &[ProfileRow]) -> Vec<ProfileRow> {
    let mut r = rows.to_vec();
    r.sort_by(|a, b| a.x.total_cmp(&b.x));
    r
}

/// Interior strict local minima.
pub fn local_minima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
        .collect()
}

pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    local_minima(&neg)
}
