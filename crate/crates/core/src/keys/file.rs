use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use super::KeyEnvelope;
use crate::error::Result;

/// Writes a key file readable only by its owner where the platform allows.
pub fn write_key_file(path: impl AsRef<Path>, key: &KeyEnvelope) -> Result<()> {
    let mut options = OpenOptions::new();
    options.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        options.mode(0o600);
    }
    let mut file = options.open(path)?;
    file.write_all(&key.export())?;
    Ok(())
}

pub fn read_key_file(path: impl AsRef<Path>) -> Result<KeyEnvelope> {
    KeyEnvelope::import(&std::fs::read(path)?)
}
