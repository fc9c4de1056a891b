//! On-disk workspace: artifact directories plus an append-only run manifest.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming the default workspace root.
pub const WORKSPACE_ENV: &str = "COVDESIGN_WORKSPACE";
pub const DEFAULT_WORKSPACE_DIR: &str = "covdesign-workspace";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Design,
    Profile,
    Report,
}

impl ArtifactKind {
    pub fn dir_name(self) -> &'static str {
        match self {
            ArtifactKind::Design => "designs",
            ArtifactKind::Profile => "profiles",
            ArtifactKind::Report => "reports",
        }
    }
}

/// One manifest record. Paths are relative to the workspace root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub command: Vec<String>,
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    #[serde(default)]
    run: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct OneRun<'a> {
    run: [&'a ManifestEntry; 1],
}

#[derive(Clone, Debug)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    /// `$COVDESIGN_WORKSPACE`, or `covdesign-workspace` in the current directory.
    pub fn default_root() -> PathBuf {
        std::env::var_os(WORKSPACE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_WORKSPACE_DIR))
    }

    /// Opens `root`, creating it and its artifact directories if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        for kind in [
            ArtifactKind::Design,
            ArtifactKind::Profile,
            ArtifactKind::Report,
        ] {
            fs::create_dir_all(root.join(kind.dir_name()))?;
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dir(&self, kind: ArtifactKind) -> PathBuf {
        self.root.join(kind.dir_name())
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(MANIFEST_FILE)
    }

    /// Writes `contents` to `<kind>/<name>` through a temporary file and a
    /// rename, returning the root-relative path.
    pub fn write_artifact(
        &self,
        kind: ArtifactKind,
        name: &str,
        contents: &[u8],
    ) -> Result<String> {
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(Error::invalid(format!("bad artifact name '{name}'")));
        }
        let path = self.dir(kind).join(name);
        let tmp = self
            .dir(kind)
            .join(format!(".{name}.{}.tmp", std::process::id()));
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, &path)?;
        Ok(format!("{}/{name}", kind.dir_name()))
    }

    /// Appends `entry` under an exclusive advisory lock.
    pub fn record(&self, entry: &ManifestEntry) -> Result<()> {
        let text = toml::to_string(&OneRun { run: [entry] })
            .expect("manifest entries are always representable");
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.manifest_path())?;
        file.lock()?;
        let res = file
            .write_all(format!("{text}\n").as_bytes())
            .and_then(|_| file.flush());
        file.unlock()?;
        res.map_err(Error::from)
    }

    /// Builds an entry stamped with the current time and appends it.
    pub fn record_run(
        &self,
        command: Vec<String>,
        seeds: Vec<u64>,
        outputs: Vec<String>,
    ) -> Result<ManifestEntry> {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let entry = ManifestEntry {
            timestamp,
            command,
            seeds,
            outputs,
        };
        self.record(&entry)?;
        Ok(entry)
    }

    pub fn manifest(&self) -> Result<Vec<ManifestEntry>> {
        let path = self.manifest_path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let file = File::open(&path)?;
        file.lock_shared()?;
        let text = fs::read_to_string(&path);
        file.unlock()?;
        let parsed: ManifestFile = toml::from_str(&text?).map_err(|e| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        })?;
        Ok(parsed.run)
    }
}
