use std::path::Path;

use crate::error::Result;

/// A header plus rows of plain numbers or labels, written with the shortest
/// round-trip float formatting so repeated runs are byte-identical.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}

/// Columns `index, t, coordinates...` for a sampled point set.
pub fn points_table(names: &[String], pts: &[nambu_core::ExtendedPoint]) -> CsvTable {
    let mut t = CsvTable::new(["index".to_string(), "t".to_string()].into_iter().chain(names.iter().cloned()));
    for (i, p) in pts.iter().enumerate() {
        let mut row = vec![i.to_string(), num(p.t())];
        row.extend(p.x().iter().map(|v| num(*v)));
        t.row(row);
    }
    t
}
