//! File formats. Every file starts with (or, for TFR1, ends with) a JSON
//! metadata record; all writes go through a temporary file in the target
//! directory followed by a rename.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use nyqmirror::tf::DISPLAY_FLOOR;
use nyqmirror::{DisplayMatrix, TfRepresentation};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TFR1_MAGIC: &[u8; 4] = b"TFR1";
pub const META_MAGIC: &[u8; 4] = b"META";

/// Provenance record embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub method: String,
    pub params: Value,
}

impl Metadata {
    pub fn new(command: &str, method: impl Into<String>, params: Value) -> Self {
        Self {
            tool: "nyqmirror".into(),
            version: VERSION.into(),
            command: command.into(),
            method: method.into(),
            params,
        }
    }

    pub fn with_method(&self, method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            ..self.clone()
        }
    }

    fn json(&self) -> String {
        serde_json::to_string(self).expect("metadata serializes")
    }
}

/// Tracks written files in order, for the command summary.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Data(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `name` atomically with the bytes produced by `fill`.
    pub fn write(&mut self, name: &str, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
        let path = self.root.join(name);
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .tempfile_in(&self.root)?;
        {
            let mut buf = io::BufWriter::new(tmp.as_file_mut());
            fill(&mut buf)?;
            buf.flush()?;
        }
        tmp.as_file().sync_all()?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
        }
        tmp.persist(&path)
            .map_err(|e| CliError::Data(format!("cannot write {}: {}", path.display(), e.error)))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with a leading `# {metadata}` line, then an RFC-4180 body.
    pub fn csv(&mut self, name: &str, meta: &Metadata, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut rows = rows;
        self.write(name, |w| {
            write!(w, "# {}\r\n", meta.json())?;
            let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
            out.write_record(header)?;
            for row in &mut rows {
                out.write_record(&row)?;
            }
            out.flush()
        })
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    /// `TFR1`, LE u64 `freq_bins`, LE u64 `frames`, frequency axis, time axis,
    /// row-major magnitudes (all LE f64), then `META`, LE u64 length, JSON.
    pub fn tfr1(&mut self, name: &str, meta: &Metadata, tfr: &TfRepresentation<f64>) -> Result<(), CliError> {
        self.write(name, |w| {
            w.write_all(TFR1_MAGIC)?;
            w.write_all(&(tfr.freq_bins() as u64).to_le_bytes())?;
            w.write_all(&(tfr.frames() as u64).to_le_bytes())?;
            for v in tfr.freq_axis().iter().chain(tfr.time_axis()).chain(&tfr.magnitudes()) {
                w.write_all(&v.to_le_bytes())?;
            }
            let json = meta.json();
            w.write_all(META_MAGIC)?;
            w.write_all(&(json.len() as u64).to_le_bytes())?;
            w.write_all(json.as_bytes())
        })
    }

    /// Wide CSV: one row per frequency bin, one column per frame.
    pub fn matrix_csv(
        &mut self,
        name: &str,
        meta: &Metadata,
        freqs: &[f64],
        times: &[f64],
        value: impl Fn(usize, usize) -> f64,
    ) -> Result<(), CliError> {
        let mut header = vec!["freq_hz".to_string()];
        header.extend(times.iter().map(|t| t.to_string()));
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = freqs.iter().enumerate().map(|(i, f)| {
            std::iter::once(f.to_string())
                .chain((0..times.len()).map(|j| value(i, j).to_string()))
                .collect()
        });
        self.csv(name, meta, &header_refs, rows)
    }

    /// 8-bit P5 image, highest frequency on the top row; the display floor
    /// maps to 0 and the largest display value to 255.
    pub fn pgm(&mut self, name: &str, meta: &Metadata, display: &DisplayMatrix<f64>) -> Result<(), CliError> {
        let pixels = pgm_pixels(display);
        self.write(name, |w| {
            write!(w, "P5\n# {}\n{} {}\n255\n", meta.json(), display.frames, display.freq_bins)?;
            w.write_all(&pixels)
        })
    }
}

pub fn pgm_pixels(display: &DisplayMatrix<f64>) -> Vec<u8> {
    let top = display.values.iter().copied().fold(DISPLAY_FLOOR, f64::max);
    let span = top - DISPLAY_FLOOR;
    let mut pixels = Vec::with_capacity(display.values.len());
    for i in (0..display.freq_bins).rev() {
        for j in 0..display.frames {
            let v = display.get(i, j);
            let level = if span > 0.0 { (v - DISPLAY_FLOOR) / span * 255.0 } else { 0.0 };
            pixels.push(level.round().clamp(0.0, 255.0) as u8);
        }
    }
    pixels
}

/// Parsed TFR1 file.
#[derive(Debug, Clone, PartialEq)]
pub struct Tfr1 {
    pub freq_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: Option<Metadata>,
}

pub fn read_tfr1(mut r: impl Read) -> io::Result<Tfr1> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != TFR1_MAGIC {
        return Err(bad("not a TFR1 file"));
    }
    let mut u64_buf = [0u8; 8];
    let mut read_u64 = |r: &mut dyn Read| -> io::Result<u64> {
        r.read_exact(&mut u64_buf)?;
        Ok(u64::from_le_bytes(u64_buf))
    };
    let bins = read_u64(&mut r)? as usize;
    let frames = read_u64(&mut r)? as usize;
    let mut read_f64s = |count: usize| -> io::Result<Vec<f64>> {
        let mut bytes = vec![0u8; count * 8];
        r.read_exact(&mut bytes)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    };
    let freq_axis = read_f64s(bins)?;
    let time_axis = read_f64s(frames)?;
    let values = read_f64s(bins * frames)?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    let metadata = if rest.is_empty() {
        None
    } else {
        if rest.len() < 12 || &rest[..4] != META_MAGIC {
            return Err(bad("trailing bytes are not a META record"));
        }
        let len = u64::from_le_bytes(rest[4..12].try_into().expect("8 bytes")) as usize;
        let json = rest.get(12..12 + len).ok_or_else(|| bad("truncated META record"))?;
        Some(serde_json::from_slice(json).map_err(|e| bad(&e.to_string()))?)
    };
    Ok(Tfr1 {
        freq_axis,
        time_axis,
        values,
        metadata,
    })
}

/// Reads a `time_s,value` CSV (leading `#` lines skipped) into times and values.
pub fn read_two_column_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CliError::Data(format!("{}: data row {}: bad column {}", path.display(), i + 1, k + 1)))
        };
        times.push(field(0)?);
        if record.len() > 1 {
            values.push(field(1)?);
        }
    }
    Ok((times, values))
}

pub fn fmt(v: f64) -> String {
    v.to_string()
}
