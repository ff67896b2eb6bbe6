//! Exit codes, file reading and atomic writes.

use std::fs;
use std::path::{Path, PathBuf};

pub const USAGE: i32 = 1;
pub const PRECONDITION: i32 = 2;
pub const BOUNDEDNESS: i32 = 3;
pub const FUEL: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Failure {
        Failure::new(PRECONDITION, message)
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::precondition(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

/// `dest`, or `input` with its extension replaced by `ext`.
pub fn output_path(dest: Option<&Path>, input: &Path, ext: &str) -> PathBuf {
    dest.map(Path::to_path_buf).unwrap_or_else(|| input.with_extension(ext))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_round_trip() {
        let dir = std::env::temp_dir().join(format!("dpx-io-{}", std::process::id()));
        let p = dir.join("nested").join("a.txt");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(read_text(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
        assert_eq!(read_text(&p).unwrap_err().code, PRECONDITION);
    }

    #[test]
    fn default_paths() {
        assert_eq!(output_path(None, Path::new("x/d.njp"), "cert"), PathBuf::from("x/d.cert"));
        assert_eq!(output_path(Some(Path::new("o.c")), Path::new("d.njp"), "cert"), PathBuf::from("o.c"));
    }
}
