//! Named test cases shipped as TOML files.

use std::path::{Path, PathBuf};

use super::HarnessError;
use super::config::RunConfig;

/// `SVE_CATALOG_DIR`, or the `catalog` directory of this crate.
pub fn catalog_dir() -> PathBuf {
    std::env::var_os("SVE_CATALOG_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog"))
}

/// Case names, sorted.
pub fn list_cases(dir: &Path) -> Result<Vec<String>, HarnessError> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "toml") {
            if let Some(stem) = path.file_stem() {
                names.push(stem.to_string_lossy().into_owned());
            }
        }
    }
    names.sort();
    Ok(names)
}

pub fn load_case(dir: &Path, name: &str) -> Result<RunConfig, HarnessError> {
    let path = dir.join(format!("{name}.toml"));
    if !path.exists() {
        return Err(HarnessError::Config(format!("unknown case {name:?}")));
    }
    RunConfig::from_file(&path)
}

/// Reads `arg` as a file path if it exists, else as a catalog name.
pub fn resolve(arg: &str) -> Result<RunConfig, HarnessError> {
    let p = Path::new(arg);
    if p.is_file() {
        RunConfig::from_file(p)
    } else {
        load_case(&catalog_dir(), arg)
    }
}
