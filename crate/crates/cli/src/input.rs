//! Dataset ingestion: CSV with a header row and ordered level lists.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use ordfuzz::data::{DatasetParts, OrdinalDataset, RankScale};
use ordfuzz::eval::{ordinalize_column, OrdinalizationSpec};

use crate::error::{CliError, Result};

/// Ordered level lists keyed by feature name, in definition order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScaleDefs {
    defs: Vec<(String, RankScale)>,
}

impl ScaleDefs {
    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<&RankScale> {
        self.defs.iter().find(|(name, _)| name == feature).map(|(_, s)| s)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }

    /// Adds one `name: low < … < high` definition.
    pub fn push_line(&mut self, line: &str) -> std::result::Result<(), String> {
        let (name, levels) = line.split_once(':').ok_or_else(|| format!("expected `name: a < b < …`, got {line:?}"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err("missing feature name".into());
        }
        if self.get(name).is_some() {
            return Err(format!("feature {name:?} defined twice"));
        }
        let levels: Vec<&str> = levels.split('<').map(str::trim).collect();
        if levels.iter().any(|l| l.is_empty()) {
            return Err(format!("empty level in the scale for {name:?}"));
        }
        let scale = RankScale::new(levels).map_err(|e| format!("scale for {name:?}: {e}"))?;
        self.defs.push((name.to_string(), scale));
        Ok(())
    }

    /// Parses a scales file: one definition per line, blank lines and
    /// `#` comments ignored.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut defs = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            defs.push_line(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(defs)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

enum ColumnKind<'a> {
    Levels(&'a RankScale),
    Ranks,
    Numeric(OrdinalizationSpec),
}

/// Reads a dataset file. See [`parse_csv`].
pub fn load_csv(path: &Path, scales: &ScaleDefs, ordinalize: Option<OrdinalizationSpec>) -> Result<OrdinalDataset> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(file, scales, ordinalize).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses comma-separated data with a header row of feature names and an
/// optional final `label` column.
///
/// A feature with a level list has its cells looked up in it. Other features
/// hold positive integer ranks, or, with `ordinalize`, numeric values that
/// are binned into ranks. Rows are numbered from 1, excluding the header.
pub fn parse_csv<R: Read>(reader: R, scales: &ScaleDefs, ordinalize: Option<OrdinalizationSpec>) -> Result<OrdinalDataset> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| CliError::Data(format!("header: {e}")))?.clone();
    let mut names: Vec<String> = header.iter().map(str::to_string).collect();
    if names.iter().all(String::is_empty) {
        return Err(CliError::Data("missing header row".into()));
    }
    let has_labels = names.last().is_some_and(|n| n.eq_ignore_ascii_case("label"));
    if has_labels {
        names.pop();
    }
    if let Some(unknown) = scales.names().find(|s| !names.iter().any(|n| n == s)) {
        return Err(CliError::Data(format!("scale given for unknown feature {unknown:?}")));
    }
    let kinds: Vec<ColumnKind<'_>> = names
        .iter()
        .map(|n| match (scales.get(n), ordinalize) {
            (Some(s), _) => ColumnKind::Levels(s),
            (None, Some(spec)) => ColumnKind::Numeric(spec),
            (None, None) => ColumnKind::Ranks,
        })
        .collect();

    let mut ranks: Vec<Vec<u32>> = Vec::new();
    let mut numeric: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut labels = Vec::new();
    let mut label_ids: HashMap<String, usize> = HashMap::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(CliError::Data(format!(
                "row {row}: expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let mut out = Vec::with_capacity(names.len());
        for (k, (cell, kind)) in record.iter().zip(&kinds).enumerate() {
            let bad = |what: String| CliError::Data(format!("row {row}, column {:?}: {what}", names[k]));
            match kind {
                ColumnKind::Levels(scale) => {
                    let rank = scale.rank(cell).ok_or_else(|| {
                        bad(format!("unknown level {cell:?} (expected one of {})", scale.levels().join(" < ")))
                    })?;
                    out.push(rank);
                }
                ColumnKind::Ranks => match cell.parse::<u32>() {
                    Ok(r) if r >= 1 => out.push(r),
                    _ => return Err(bad(format!("{cell:?} is not a positive integer rank and no scale is defined"))),
                },
                ColumnKind::Numeric(_) => {
                    let x: f64 = cell.parse().map_err(|_| bad(format!("{cell:?} is not a number")))?;
                    if !x.is_finite() {
                        return Err(bad(format!("{cell:?} is not finite")));
                    }
                    numeric[k].push(x);
                    out.push(0);
                }
            }
        }
        if has_labels {
            let cell = &record[names.len()];
            if cell.is_empty() {
                return Err(CliError::Data(format!("row {row}: empty label")));
            }
            let next = label_ids.len();
            labels.push(*label_ids.entry(cell.to_string()).or_insert(next));
        }
        ranks.push(out);
    }
    if ranks.is_empty() {
        return Err(CliError::Data("no observations".into()));
    }

    let mut scale_list = Vec::with_capacity(names.len());
    for (k, kind) in kinds.iter().enumerate() {
        let scale = match kind {
            ColumnKind::Levels(s) => (*s).clone(),
            ColumnKind::Ranks => {
                let top = ranks.iter().map(|r| r[k]).max().unwrap_or(1);
                RankScale::numeric(top as usize)?
            }
            ColumnKind::Numeric(spec) => {
                let binned = ordinalize_column(&numeric[k], spec)
                    .map_err(|e| CliError::Data(format!("column {:?}: {e}", names[k])))?;
                for (row, r) in ranks.iter_mut().zip(binned) {
                    row[k] = r;
                }
                RankScale::numeric(spec.bins)?
            }
        };
        scale_list.push(scale);
    }

    let parts = DatasetParts { names, scales: scale_list, ranks, labels: has_labels.then_some(labels) };
    OrdinalDataset::from_parts(parts).map_err(|e| CliError::Data(e.to_string()))
}
