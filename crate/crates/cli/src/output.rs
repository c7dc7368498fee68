use std::path::Path;

use crate::error::CliError;

/// One CSV table produced by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emitted {
    pub name: String,
    pub contents: String,
}

/// Ten significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.9e}")
}

pub struct Table {
    name: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self {
            name: name.to_string(),
            writer,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<Emitted, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(Emitted {
            name: self.name,
            contents: String::from_utf8(bytes).expect("CSV fields are UTF-8"),
        })
    }
}

/// Writes every table into `dir` as `<name>.csv`.
pub fn write_all(dir: &Path, tables: &[Emitted]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for t in tables {
        std::fs::write(dir.join(format!("{}.csv", t.name)), &t.contents)?;
    }
    Ok(())
}

/// Concatenates tables for stdout, each introduced by `# <name>.csv`.
pub fn render(tables: &[Emitted]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if tables.len() > 1 {
            out.push_str(&format!("# {}.csv\n", t.name));
        }
        out.push_str(&t.contents);
    }
    out
}
