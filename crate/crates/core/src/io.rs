//! Loading and writing complex, group, action, and measure files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::complex::{Complex, ComplexFile};
use crate::error::{Error, Result};
use crate::group::{ActionFile, CatalogGroup, Group, GroupAction, GroupFile};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_complex(path: &Path) -> Result<Complex> {
    let file: ComplexFile = serde_json::from_str(&read(path)?)?;
    file.build()
}

/// A catalog name (`C3`, `S3`, `cyclic:4`, ...) or a path to a group file,
/// resolved relative to `base`.
pub fn resolve_group(reference: &str, base: &Path) -> Result<Arc<Group>> {
    if let Ok(kind) = reference.parse::<CatalogGroup>() {
        return Ok(Arc::new(Group::catalog(kind)?));
    }
    let path = base.join(reference);
    if !path.exists() {
        return Err(Error::Parse(format!("unknown group `{reference}`")));
    }
    let file: GroupFile = serde_json::from_str(&read(&path)?)?;
    Ok(Arc::new(Group::from_file(&file)?))
}

fn parent(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load_action(path: &Path) -> Result<GroupAction> {
    let file: ActionFile = serde_json::from_str(&read(path)?)?;
    let base = parent(path);
    let group = resolve_group(&file.group_ref, &base)?;
    let complex = load_complex(&base.join(&file.complex_ref))?;
    GroupAction::new(group, complex, file.act_table)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `<stem>.complex.json` and `<stem>.action.json` into `dir`, plus
/// `<stem>.group.json` when the group is not a catalog group.
/// Returns the action file path.
pub fn write_action(action: &GroupAction, dir: &Path, stem: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let complex_name = format!("{stem}.complex.json");
    write_json(&dir.join(&complex_name), &action.complex().to_file())?;
    let group_ref = match action.group().catalog_kind() {
        Some(kind) => kind.to_string(),
        None => {
            let name = format!("{stem}.group.json");
            write_json(&dir.join(&name), &action.group().to_file())?;
            name
        }
    };
    let path = dir.join(format!("{stem}.action.json"));
    write_json(&path, &action.to_file(&group_ref, &complex_name))?;
    Ok(path)
}
