//! Result tables and where they are written.
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;

use cocoa_core::replicate::Report;
pub use cocoa_core::replicate::Table;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Txt,
}

/// Serializes rows through the CSV writer so headers follow the struct fields.
pub fn serialize_rows<T: Serialize>(rows: &[T]) -> anyhow::Result<Table> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row)?;
    }
    let bytes = wtr.into_inner().map_err(|e| e.into_error())?;
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let columns = rdr.headers()?.iter().map(str::to_owned).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { columns, rows })
}

pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Self {
        Sink { dir, format }
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    fn write_file(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        let dir = self.dir.as_ref().expect("only called with an output directory");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    fn stdout(&self, contents: &str) -> anyhow::Result<()> {
        let mut out = std::io::stdout().lock();
        out.write_all(contents.as_bytes())?;
        out.flush()?;
        Ok(())
    }

    pub fn table(&self, name: &str, table: &Table) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Csv => table.to_csv()?,
            Format::Txt => table.render_text(),
        };
        match self.dir {
            Some(_) => {
                let ext = if self.format == Format::Csv { "csv" } else { "txt" };
                self.write_file(&format!("{name}.{ext}"), &text)
            }
            None => self.stdout(&text),
        }
    }

    /// With a directory every target gets its check CSV, its text report and,
    /// for figures, a plot-ready dataset; stdout receives the chosen format.
    pub fn report(&self, report: &Report) -> anyhow::Result<()> {
        let name = report.target.name();
        if self.dir.is_some() {
            self.write_file(&format!("{name}.csv"), &report.checks_csv()?)?;
            self.write_file(&format!("{name}.txt"), &report.render_text())?;
            if let Some(data) = &report.dataset {
                self.write_file(&format!("{name}_data.csv"), &data.to_csv()?)?;
            }
            return Ok(());
        }
        match self.format {
            Format::Txt => self.stdout(&format!("{}\n", report.render_text())),
            Format::Csv => self.stdout(&report.checks_csv()?),
        }
    }
}
