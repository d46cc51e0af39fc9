use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// A staging directory next to the final output; `commit` swaps it into place.
pub struct Staging {
    tmp: PathBuf,
    target: PathBuf,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Staging> {
        let name = target.file_name().map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
        let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        }
        fs::create_dir_all(&tmp).map_err(|e| CliError::io(&tmp, e))?;
        Ok(Staging { tmp, target: target.to_path_buf() })
    }

    pub fn path(&self) -> &Path {
        &self.tmp
    }

    pub fn join(&self, rel: &str) -> PathBuf {
        self.tmp.join(rel)
    }

    /// Writes `manifest.json` listing every file with its SHA-256, then replaces the target.
    pub fn commit(self) -> Result<PathBuf> {
        let manifest = manifest(&self.tmp)?;
        write_json(&self.tmp.join("manifest.json"), &manifest)?;
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(|e| CliError::io(&self.target, e))?;
        }
        fs::rename(&self.tmp, &self.target).map_err(|e| CliError::io(&self.target, e))?;
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.tmp);
    }
}

fn files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_dir() {
            files(root, &path, out)?;
        } else {
            out.push(path.strip_prefix(root).expect("under root").to_path_buf());
        }
    }
    Ok(())
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn manifest(root: &Path) -> Result<BTreeMap<String, String>> {
    let mut all = Vec::new();
    files(root, root, &mut all)?;
    let mut m = BTreeMap::new();
    for rel in all {
        let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        m.insert(key, sha256_hex(&root.join(&rel))?);
    }
    Ok(m)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    segmint_core::report::write_json(path, value).map_err(|source| crate::error::CliError::Core {
        context: format!("writing {}", path.display()),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
