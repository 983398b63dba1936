//! Verb × trait-value contingency table.
//!
//! Each row is one distinct (verb, voice) pair; each column counts how many of
//! the verb's interaction records carry a given trait value. Genre and work
//! are deliberately not features.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{ActionRecord, TraitCategory, Voice};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    columns: Vec<(TraitCategory, String)>,
}

impl ColumnSchema {
    pub fn columns(&self) -> &[(TraitCategory, String)] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn position(&self, category: TraitCategory, value: &str) -> Option<usize> {
        // Columns are sorted by (category, value), so binary search applies.
        self.columns
            .binary_search_by(|(c, v)| (*c, v.as_str()).cmp(&(category, value)))
            .ok()
    }

    /// Column names as written in table exports, `category=value`.
    pub fn column_names(&self) -> impl Iterator<Item = String> + '_ {
        self.columns.iter().map(|(c, v)| format!("{c}={v}"))
    }

    /// Index range of one category's columns.
    pub fn category_range(&self, category: TraitCategory) -> std::ops::Range<usize> {
        let start = self.columns.partition_point(|(c, _)| *c < category);
        let end = self.columns.partition_point(|(c, _)| *c <= category);
        start..end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbProfile {
    pub verb: String,
    pub label: Voice,
    /// Aligned with the table's [`ColumnSchema`].
    pub features: Vec<u32>,
    pub usage_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub schema: ColumnSchema,
    /// Sorted by verb, then voice.
    pub rows: Vec<VerbProfile>,
}

impl ContingencyTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.features.iter().map(|&c| f64::from(c)).collect())
            .collect()
    }

    pub fn labels(&self) -> Vec<Voice> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn find(&self, verb: &str, label: Voice) -> Option<&VerbProfile> {
        self.rows
            .binary_search_by(|r| (r.verb.as_str(), r.label).cmp(&(verb, label)))
            .ok()
            .map(|i| &self.rows[i])
    }

    /// Writes `verb,label,usage_count,category=value,...`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["verb".to_owned(), "label".into(), "usage_count".into()];
        header.extend(self.schema.column_names());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut fields = vec![
                row.verb.clone(),
                row.label.to_string(),
                row.usage_count.to_string(),
            ];
            fields.extend(row.features.iter().map(u32::to_string));
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn build_schema(records: &[ActionRecord]) -> Result<ColumnSchema> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let pairs: BTreeSet<(TraitCategory, &str)> =
        records.iter().flat_map(|r| r.traits.iter()).collect();
    Ok(ColumnSchema {
        columns: pairs.into_iter().map(|(c, v)| (c, v.to_owned())).collect(),
    })
}

pub fn build_table(records: &[ActionRecord], schema: &ColumnSchema) -> Result<ContingencyTable> {
    let mut index: HashMap<(TraitCategory, &str), usize> = HashMap::with_capacity(schema.len());
    for (i, (c, v)) in schema.columns.iter().enumerate() {
        index.insert((*c, v.as_str()), i);
    }

    let mut rows: BTreeMap<(&str, Voice), VerbProfile> = BTreeMap::new();
    for r in records {
        let profile = rows
            .entry((r.verb.as_str(), r.voice))
            .or_insert_with(|| VerbProfile {
                verb: r.verb.clone(),
                label: r.voice,
                features: vec![0; schema.len()],
                usage_count: 0,
            });
        profile.usage_count += 1;
        for (category, value) in r.traits.iter() {
            let col = index.get(&(category, value)).ok_or_else(|| {
                Error::Consistency(format!(
                    "trait value `{value}` ({category}) of verb `{}` is not in the column schema",
                    r.verb
                ))
            })?;
            profile.features[*col] += 1;
        }
    }

    Ok(ContingencyTable {
        schema: schema.clone(),
        rows: rows.into_values().collect(),
    })
}
