use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to repeat a run: `rerun` is a complete argument list
/// with every default spelled out.
#[derive(Debug, Serialize)]
pub struct Sidecar<C: Serialize, E: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub rerun: Vec<String>,
    pub config: C,
    pub rows: usize,
    pub truncated: Option<String>,
    #[serde(flatten)]
    pub extra: E,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `csv` to `path` (stdout when `None`) and the sidecar next to it.
pub fn emit<C: Serialize, E: Serialize>(path: Option<&Path>, csv: &str, sidecar: &Sidecar<C, E>) -> io::Result<()> {
    match path {
        Some(p) => {
            fs::write(p, csv)?;
            let mut json = serde_json::to_string_pretty(sidecar).map_err(io::Error::other)?;
            json.push('\n');
            fs::write(sidecar_path(p), json)
        }
        None => io::stdout().lock().write_all(csv.as_bytes()),
    }
}

/// `x` rounded to 12 significant figures, in fixed notation where that
/// stays readable.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_figures() {
        assert_eq!(sig12(0.323_065_947_330_2), "0.323065947330");
        assert_eq!(sig12(1.316_957_896_924_816_7), "1.31695789692");
        assert_eq!(sig12(-12.5), "-12.5000000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
    }
}
