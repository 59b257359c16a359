//! File input and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use pid_core::dynamics::{Event, OpinionState};
use pid_core::experiments::parse_state;
use pid_core::sequences::UpdateSequence;
use pid_core::Network;
use tempfile::NamedTempFile;

use crate::CliError;

pub fn read_network(path: &Path) -> Result<Network, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    Network::from_edge_list(&text)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<OpinionState, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_state(&text)?)
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: &dyn std::fmt::Display| CliError::runtime(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

/// Serializes rows with a header into CSV bytes.
pub fn csv_bytes<R: serde::Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::runtime(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::runtime(format!("csv: {e}")))
}

/// Event rows `(index, node, new_opinion)` with 1-based index and node.
pub fn event_rows(events: &[Event]) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
    events.iter().enumerate().map(|(t, e)| (t + 1, e.node + 1, e.opinion))
}

/// Reads a sequence CSV `step,node,new_opinion` (1-based node ids). Rows
/// are applied in file order; the step column is checked to be 1, 2, ...
pub fn read_sequence(path: &Path) -> Result<UpdateSequence, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut events = Vec::new();
    for (k, row) in r.deserialize::<(usize, usize, i64)>().enumerate() {
        let line = k + 2;
        let (step, node, z) =
            row.map_err(|e| CliError::runtime(format!("{} line {line}: {e}", path.display())))?;
        if step != k + 1 {
            return Err(CliError::runtime(format!(
                "{} line {line}: expected step {}, found {step}",
                path.display(),
                k + 1
            )));
        }
        if node == 0 {
            return Err(CliError::runtime(format!("{} line {line}: node ids are 1-based", path.display())));
        }
        events.push(Event::new(node - 1, z));
    }
    Ok(UpdateSequence::new(events))
}
