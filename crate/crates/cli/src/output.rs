use floquet_core::{Error, Result};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Provenance written as `#` lines at the top of every output file.
#[derive(Debug, Clone)]
pub struct Meta {
    lines: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &str, canonical_config: &str) -> Self {
        let hash = hex::encode(Sha256::digest(canonical_config.as_bytes()));
        let lines = vec![
            (
                "generator".into(),
                format!("floquet-cli {}", env!("CARGO_PKG_VERSION")),
            ),
            (
                "core".into(),
                format!("floquet-core {}", floquet_core::VERSION),
            ),
            ("command".into(), command.into()),
            ("config_sha256".into(), hash),
        ];
        Self { lines }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.lines.push((key.into(), value.to_string()));
        self
    }
}

pub struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Open `name` in the output directory with the metadata block and header row.
    pub fn table(&mut self, name: &str, meta: &Meta, header: &[&str]) -> Result<Table> {
        let path = self.dir.join(name);
        let mut file = BufWriter::new(File::create(&path)?);
        write_meta(&mut file, meta)?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header).map_err(csv_err)?;
        self.written.push(path);
        Ok(Table { writer })
    }
}

pub fn write_meta(out: &mut impl Write, meta: &Meta) -> Result<()> {
    for (k, v) in &meta.lines {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

pub struct Table {
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(Error::from)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
