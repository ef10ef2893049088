//! Length-prefixed record files.
//!
//! A record is a little-endian `u32` byte length followed by that many bytes
//! of canonical JSON. A truncated trailing record, left by a crash during an
//! append, is cut off when the file is opened.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

pub(crate) struct Journal {
    path: PathBuf,
    file: File,
    sync: bool,
}

/// Splits `bytes` into complete records. Returns the records and the byte
/// length they cover.
pub(crate) fn split_records(bytes: &[u8]) -> (Vec<&[u8]>, usize) {
    let mut records = Vec::new();
    let mut offset = 0;
    while bytes.len() - offset >= 4 {
        let len = u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap()) as usize;
        let end = offset + 4 + len;
        if end > bytes.len() {
            break;
        }
        records.push(&bytes[offset + 4..end]);
        offset = end;
    }
    (records, offset)
}

fn frame(payload: &[u8], out: &mut Vec<u8>) -> io::Result<()> {
    let len = u32::try_from(payload.len())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "record larger than 4 GiB"))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(payload);
    Ok(())
}

impl Journal {
    /// Opens or creates the journal and returns its complete records.
    pub(crate) fn open(path: &Path, sync: bool) -> io::Result<(Self, Vec<Vec<u8>>)> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (records, valid) = split_records(&bytes);
        let records: Vec<Vec<u8>> = records.into_iter().map(<[u8]>::to_vec).collect();
        if valid < bytes.len() {
            file.set_len(valid as u64)?;
            file.sync_all()?;
        }
        file.seek(SeekFrom::End(0))?;
        Ok((
            Self {
                path: path.to_owned(),
                file,
                sync,
            },
            records,
        ))
    }

    pub(crate) fn append(&mut self, payload: &[u8]) -> io::Result<()> {
        let mut buf = Vec::with_capacity(payload.len() + 4);
        frame(payload, &mut buf)?;
        self.file.write_all(&buf)?;
        if self.sync {
            self.file.sync_data()?;
        }
        Ok(())
    }

    /// Drops every record; used after a snapshot has absorbed them.
    pub(crate) fn clear(&mut self) -> io::Result<()> {
        self.file.set_len(0)?;
        self.file.seek(SeekFrom::Start(0))?;
        if self.sync {
            self.file.sync_all()?;
        }
        Ok(())
    }

    pub(crate) fn path(&self) -> &Path {
        &self.path
    }
}

/// Writes `records` to `path` through a temporary file and a rename.
pub(crate) fn write_records_atomically(path: &Path, records: &[Vec<u8>], sync: bool) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut buf = Vec::new();
    for r in records {
        frame(r, &mut buf)?;
    }
    {
        let mut f = File::create(&tmp)?;
        f.write_all(&buf)?;
        if sync {
            f.sync_all()?;
        }
    }
    fs::rename(&tmp, path)?;
    if sync {
        if let Some(dir) = path.parent() {
            // Directory fsync is not supported everywhere; the rename itself is atomic.
            if let Ok(d) = File::open(dir) {
                let _ = d.sync_all();
            }
        }
    }
    Ok(())
}

pub(crate) fn read_records(path: &Path) -> io::Result<Vec<Vec<u8>>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let (records, valid) = split_records(&bytes);
    if valid != bytes.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{} has {} trailing bytes", path.display(), bytes.len() - valid),
        ));
    }
    Ok(records.into_iter().map(<[u8]>::to_vec).collect())
}
