//! Downloader for the SNAP datasets in [`crate::dataset::DATASETS`].

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use thiserror::Error;

use crate::dataset::{self, DatasetInfo};
use crate::graph::{load_edge_list_path, GraphError};

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown dataset {name:?}; valid names: {}", valid.join(", "))]
    UnknownDataset { name: String, valid: Vec<&'static str> },
    #[error("network error fetching {url}: {message} (retryable)")]
    Network { url: String, message: String },
    #[error("download of {name} is corrupt: {source}")]
    Corrupt {
        name: String,
        #[source]
        source: GraphError,
    },
    #[error("archive for {name} has no member {member}")]
    MissingMember { name: String, member: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FetchError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, FetchError::Network { .. })
    }
}

/// Downloads and decompresses `name` into `destination`, returning the edge-list path.
///
/// An existing file that parses is returned without touching the network.
pub fn fetch_dataset(name: &str, destination: &Path) -> Result<PathBuf, FetchError> {
    let info = dataset::lookup(name).ok_or_else(|| FetchError::UnknownDataset {
        name: name.to_string(),
        valid: dataset::names(),
    })?;
    fs::create_dir_all(destination)?;
    let target = destination.join(info.file_name());
    if target.is_file() && load_edge_list_path(&target).is_ok() {
        return Ok(target);
    }

    let partial = destination.join(format!("{}.part", info.file_name()));
    download_into(info, &partial)?;
    load_edge_list_path(&partial).map_err(|source| {
        let _ = fs::remove_file(&partial);
        FetchError::Corrupt {
            name: info.name.to_string(),
            source,
        }
    })?;
    fs::rename(&partial, &target)?;
    Ok(target)
}

fn download_into(info: &DatasetInfo, path: &Path) -> Result<(), FetchError> {
    let network = |e: ureq::Error| FetchError::Network {
        url: info.url.to_string(),
        message: e.to_string(),
    };
    let response = ureq::get(info.url).call().map_err(network)?;
    let body = response.into_body().into_with_config().limit(u64::MAX).reader();
    let gz = MultiGzDecoder::new(BufReader::new(body));
    let mut out = BufWriter::new(File::create(path)?);
    match info.archive_member {
        None => copy(gz, &mut out, info)?,
        Some(member) => {
            let mut archive = tar::Archive::new(gz);
            let mut found = false;
            for entry in archive.entries()? {
                let entry = entry?;
                let is_member = entry.path()?.file_name().is_some_and(|f| f == member);
                if is_member {
                    copy(entry, &mut out, info)?;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(FetchError::MissingMember {
                    name: info.name.to_string(),
                    member: member.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn copy<R: Read, W: io::Write>(mut from: R, to: &mut W, info: &DatasetInfo) -> Result<(), FetchError> {
    io::copy(&mut from, to).map_err(|e| match e.kind() {
        io::ErrorKind::InvalidData | io::ErrorKind::InvalidInput => FetchError::Corrupt {
            name: info.name.to_string(),
            source: GraphError::Io(e),
        },
        _ => FetchError::Network {
            url: info.url.to_string(),
            message: e.to_string(),
        },
    })?;
    Ok(())
}
