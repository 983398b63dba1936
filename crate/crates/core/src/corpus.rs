//! Interaction records: ingestion from delimited text, trait recoding and
//! corpus-level validation.
//!
//! An [`ActionRecord`] is one character–verb interaction. Every record carries
//! exactly one value for each of the five trait categories; blank or absent
//! source cells become [`UNKNOWN`] so that per-category counts always add up
//! to the number of records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel for a missing trait value. Counted as a real value downstream.
pub const UNKNOWN: &str = "Unknown";

/// Column order of the canonical corpus file.
pub const CANONICAL_HEADER: [&str; 9] = [
    "work_id",
    "genre",
    "verb",
    "voice",
    "gender",
    "species",
    "race_ethnicity",
    "age",
    "sexuality",
];

/// Grammatical stance of a character towards the technology: performing the
/// action ("scanning") or being acted upon ("scanned").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Voice {
    Active,
    Passive,
}

impl Voice {
    pub fn as_str(self) -> &'static str {
        match self {
            Voice::Active => "Active",
            Voice::Passive => "Passive",
        }
    }
}

impl fmt::Display for Voice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Voice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "active" => Ok(Voice::Active),
            "passive" => Ok(Voice::Passive),
            _ => Err(format!(
                "malformed voice value `{s}` (expected Active or Passive)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Genre {
    Artwork,
    Game,
    Movie,
    Novel,
}

impl Genre {
    pub const ALL: [Genre; 4] = [Genre::Artwork, Genre::Game, Genre::Movie, Genre::Novel];

    pub fn as_str(self) -> &'static str {
        match self {
            Genre::Artwork => "Artwork",
            Genre::Game => "Game",
            Genre::Movie => "Movie",
            Genre::Novel => "Novel",
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "artwork" | "art" | "digital art" | "electronic literature" => Ok(Genre::Artwork),
            "game" | "videogame" | "video game" => Ok(Genre::Game),
            "movie" | "film" | "tv" | "tv series" => Ok(Genre::Movie),
            "novel" | "narrative" | "book" => Ok(Genre::Novel),
            _ => Err(format!("unrecognised genre `{s}`")),
        }
    }
}

/// The five character-trait categories, in their fixed column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraitCategory {
    Gender,
    Species,
    RaceEthnicity,
    Age,
    Sexuality,
}

impl TraitCategory {
    pub const ALL: [TraitCategory; 5] = [
        TraitCategory::Gender,
        TraitCategory::Species,
        TraitCategory::RaceEthnicity,
        TraitCategory::Age,
        TraitCategory::Sexuality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TraitCategory::Gender => "gender",
            TraitCategory::Species => "species",
            TraitCategory::RaceEthnicity => "race_ethnicity",
            TraitCategory::Age => "age",
            TraitCategory::Sexuality => "sexuality",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TraitCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TraitCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TraitCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown trait category `{s}`"))
    }
}

/// One value per trait category, indexed by [`TraitCategory`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Traits([String; 5]);

impl Traits {
    /// Builds a bundle, materialising blank values as [`UNKNOWN`].
    pub fn new<S: AsRef<str>>(values: [S; 5]) -> Self {
        Traits(values.map(|v| normalize_trait(v.as_ref())))
    }

    pub fn get(&self, category: TraitCategory) -> &str {
        &self.0[category.index()]
    }

    pub fn set(&mut self, category: TraitCategory, value: impl AsRef<str>) {
        self.0[category.index()] = normalize_trait(value.as_ref());
    }

    pub fn iter(&self) -> impl Iterator<Item = (TraitCategory, &str)> {
        TraitCategory::ALL
            .into_iter()
            .zip(self.0.iter().map(String::as_str))
    }
}

impl Default for Traits {
    fn default() -> Self {
        Traits::new([""; 5])
    }
}

fn normalize_trait(raw: &str) -> String {
    let v = raw.trim();
    if v.is_empty() {
        UNKNOWN.to_owned()
    } else {
        v.to_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionRecord {
    pub work_id: String,
    pub genre: Option<Genre>,
    /// Lowercased, trimmed, never empty.
    pub verb: String,
    pub voice: Voice,
    pub traits: Traits,
}

impl ActionRecord {
    pub fn new(verb: &str, voice: Voice, traits: Traits) -> Result<Self> {
        let verb = normalize_verb(verb).ok_or_else(|| Error::config("empty verb"))?;
        Ok(ActionRecord {
            work_id: String::new(),
            genre: None,
            verb,
            voice,
            traits,
        })
    }

    pub fn with_work(mut self, work_id: impl Into<String>, genre: Option<Genre>) -> Self {
        self.work_id = work_id.into();
        self.genre = genre;
        self
    }
}

fn normalize_verb(raw: &str) -> Option<String> {
    let v = raw.trim().to_lowercase();
    (!v.is_empty()).then_some(v)
}

/// Maps canonical fields onto source column names.
///
/// `work_id` and `genre` are optional; every other field must name a column
/// present in the header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnConfig {
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub work_id: Option<String>,
    #[serde(default)]
    pub genre: Option<String>,
    pub verb: String,
    pub voice: String,
    pub gender: String,
    pub species: String,
    pub race_ethnicity: String,
    pub age: String,
    pub sexuality: String,
}

fn default_delimiter() -> char {
    ','
}

impl Default for ColumnConfig {
    /// The canonical corpus layout.
    fn default() -> Self {
        ColumnConfig {
            delimiter: ',',
            work_id: Some("work_id".into()),
            genre: Some("genre".into()),
            verb: "verb".into(),
            voice: "voice".into(),
            gender: "gender".into(),
            species: "species".into(),
            race_ethnicity: "race_ethnicity".into(),
            age: "age".into(),
            sexuality: "sexuality".into(),
        }
    }
}

impl ColumnConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ColumnConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("column config: {e}")))?;
        if !cfg.delimiter.is_ascii() {
            return Err(Error::config(
                "column config: delimiter must be a single ASCII character",
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_config_file(path)?)
    }

    fn trait_column(&self, category: TraitCategory) -> &str {
        match category {
            TraitCategory::Gender => &self.gender,
            TraitCategory::Species => &self.species,
            TraitCategory::RaceEthnicity => &self.race_ethnicity,
            TraitCategory::Age => &self.age,
            TraitCategory::Sexuality => &self.sexuality,
        }
    }
}

pub(crate) fn read_config_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::ConfigFile {
        path: path.to_owned(),
        source,
    })
}

/// Reads long-format interaction rows, one [`ActionRecord`] per data row.
pub fn parse_actions<R: Read>(source: R, config: &ColumnConfig) -> Result<Vec<ActionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter as u8)
        .has_headers(true)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let locate = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_owned(),
            })
    };

    let verb_col = locate(&config.verb)?;
    let voice_col = locate(&config.voice)?;
    let trait_cols = TraitCategory::ALL
        .iter()
        .map(|&c| locate(config.trait_column(c)))
        .collect::<Result<Vec<_>>>()?;
    let work_col = config.work_id.as_deref().map(locate).transpose()?;
    let genre_col = config.genre.as_deref().map(locate).transpose()?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let row_no = i + 1;
        let cell = |col: usize| row.get(col).unwrap_or("");

        let verb = normalize_verb(cell(verb_col)).ok_or_else(|| Error::Row {
            row: row_no,
            message: "empty verb".into(),
        })?;
        let voice = cell(voice_col)
            .parse::<Voice>()
            .map_err(|message| Error::Row {
                row: row_no,
                message,
            })?;
        let genre = match genre_col.map(cell).map(str::trim) {
            None | Some("") => None,
            Some(g) => Some(g.parse::<Genre>().map_err(|message| Error::Row {
                row: row_no,
                message,
            })?),
        };
        let mut traits = Traits::default();
        for (&category, &col) in TraitCategory::ALL.iter().zip(&trait_cols) {
            traits.set(category, cell(col));
        }

        records.push(ActionRecord {
            work_id: work_col.map(cell).unwrap_or("").trim().to_owned(),
            genre,
            verb,
            voice,
            traits,
        });
    }
    Ok(records)
}

/// Writes records in the canonical corpus layout ([`CANONICAL_HEADER`]).
pub fn write_corpus<W: Write>(out: W, records: &[ActionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CANONICAL_HEADER)?;
    for r in records {
        let genre = r.genre.map(Genre::as_str).unwrap_or("");
        let mut row = vec![r.work_id.as_str(), genre, &r.verb, r.voice.as_str()];
        row.extend(r.traits.iter().map(|(_, v)| v));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-category source→canonical value substitutions.
///
/// Loaded from TOML with one table per trait category:
///
/// ```toml
/// [race_ethnicity]
/// Black = "PoC"
/// Indigenous = "PoC"
/// ```
///
/// Values without an entry pass through unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecodeMap(BTreeMap<TraitCategory, BTreeMap<String, String>>);

impl RecodeMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        category: TraitCategory,
        from: impl Into<String>,
        to: impl Into<String>,
    ) -> Result<()> {
        let to = to.into();
        if to.trim().is_empty() {
            return Err(Error::config(format!(
                "recode target for {category} is empty"
            )));
        }
        self.0
            .entry(category)
            .or_default()
            .insert(from.into().trim().to_owned(), to.trim().to_owned());
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, BTreeMap<String, String>> =
            toml::from_str(text).map_err(|e| Error::config(format!("recode map: {e}")))?;
        let mut map = RecodeMap::new();
        for (section, entries) in raw {
            let category = section
                .parse::<TraitCategory>()
                .map_err(|e| Error::config(format!("recode map: {e}")))?;
            for (from, to) in entries {
                map.insert(category, from, to)?;
            }
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_config_file(path)?)
    }

    pub fn lookup(&self, category: TraitCategory, value: &str) -> Option<&str> {
        self.0.get(&category)?.get(value).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.values().all(BTreeMap::is_empty)
    }
}

/// Replaces each trait value by its mapping, when one exists.
pub fn recode_traits(records: &[ActionRecord], map: &RecodeMap) -> Vec<ActionRecord> {
    records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            for category in TraitCategory::ALL {
                if let Some(to) = map.lookup(category, r.traits.get(category)) {
                    r.traits.set(category, to);
                }
            }
            r
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryInventory {
    pub category: TraitCategory,
    pub values: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Distinct (verb, voice) pairs.
    pub unique_verb_count: usize,
    /// One per record.
    pub total_usage_count: usize,
    pub inventories: Vec<CategoryInventory>,
}

pub fn validate_corpus(records: &[ActionRecord]) -> Result<CorpusStats> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let verbs: BTreeSet<(&str, Voice)> =
        records.iter().map(|r| (r.verb.as_str(), r.voice)).collect();
    let mut inventories: Vec<CategoryInventory> = TraitCategory::ALL
        .into_iter()
        .map(|category| CategoryInventory {
            category,
            values: BTreeMap::new(),
        })
        .collect();
    for r in records {
        for (category, value) in r.traits.iter() {
            *inventories[category.index()]
                .values
                .entry(value.to_owned())
                .or_default() += 1;
        }
    }
    Ok(CorpusStats {
        unique_verb_count: verbs.len(),
        total_usage_count: records.len(),
        inventories,
    })
}
