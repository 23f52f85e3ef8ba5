use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

pub const MANIFEST_SCHEMA: &str = "expsig.manifest/1";

/// Parameters and provenance of one run, written next to each output file as
/// `<out>.manifest.json`. The data file itself carries no timestamp, so
/// re-running `argv` reproduces it byte for byte on exact paths.
#[derive(Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub subcommand: &'static str,
    pub argv: Vec<String>,
    pub parameters: Value,
    pub tool_version: &'static str,
    pub timestamp_unix: u64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, parameters: Value) -> Self {
        Self {
            schema: MANIFEST_SCHEMA,
            subcommand,
            argv: std::env::args().skip(1).collect(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Sends the rendered output to `out` (with its manifest) or to stdout.
pub fn emit(out: Option<&Path>, body: &str, mut manifest: RunManifest) -> io::Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, body.as_bytes())?;
            manifest.outputs.push(path.to_path_buf());
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".manifest.json");
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            write_atomic(Path::new(&sidecar), format!("{text}\n").as_bytes())
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn json_body(value: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(value).expect("json serializes"))
}

/// CSV with a leading `# {json}` comment line carrying the schema and
/// parameters.
pub fn csv_body(header: &Value, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("# {}\n", serde_json::to_string(header).expect("json serializes"));
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}
