//! Active vs. passive usage per trait value, overall and per genre.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{ActionRecord, Genre, TraitCategory, Voice};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenreKey {
    All,
    Genre(Genre),
}

impl fmt::Display for GenreKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenreKey::All => f.write_str("All"),
            GenreKey::Genre(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub trait_category: TraitCategory,
    pub trait_value: String,
    pub genre: GenreKey,
    pub active_uses: usize,
    pub passive_uses: usize,
    /// 0 when the row has no uses at all.
    pub active_proportion: f64,
}

impl DistributionRow {
    pub fn total_uses(&self) -> usize {
        self.active_uses + self.passive_uses
    }

    pub fn is_empty(&self) -> bool {
        self.total_uses() == 0
    }
}

/// Counts uses per (category, value, genre). With `by_genre`, every value is
/// crossed with every genre present in the corpus, so value/genre pairs that
/// never occur appear as empty rows. The `All` rows are always emitted.
pub fn trait_voice_distribution(
    records: &[ActionRecord],
    by_genre: bool,
) -> Result<Vec<DistributionRow>> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut genres = vec![GenreKey::All];
    if by_genre {
        let present: BTreeSet<Genre> = records.iter().filter_map(|r| r.genre).collect();
        genres.extend(present.into_iter().map(GenreKey::Genre));
    }

    let mut counts: BTreeMap<(TraitCategory, &str, GenreKey), (usize, usize)> = BTreeMap::new();
    for r in records {
        for (category, value) in r.traits.iter() {
            let mut bump = |g: GenreKey| {
                let cell = counts.entry((category, value, g)).or_default();
                match r.voice {
                    Voice::Active => cell.0 += 1,
                    Voice::Passive => cell.1 += 1,
                }
            };
            bump(GenreKey::All);
            if let (true, Some(g)) = (by_genre, r.genre) {
                bump(GenreKey::Genre(g));
            }
        }
    }

    let values: BTreeSet<(TraitCategory, &str)> = counts.keys().map(|&(c, v, _)| (c, v)).collect();
    let mut rows = Vec::with_capacity(values.len() * genres.len());
    for (category, value) in values {
        for &genre in &genres {
            let (active, passive) = counts
                .get(&(category, value, genre))
                .copied()
                .unwrap_or_default();
            let total = active + passive;
            rows.push(DistributionRow {
                trait_category: category,
                trait_value: value.to_owned(),
                genre,
                active_uses: active,
                passive_uses: passive,
                active_proportion: if total > 0 {
                    active as f64 / total as f64
                } else {
                    0.0
                },
            });
        }
    }
    Ok(rows)
}

pub fn write_distribution_csv<W: Write>(out: W, rows: &[DistributionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trait_category",
        "trait_value",
        "genre",
        "active_uses",
        "passive_uses",
        "active_proportion",
    ])?;
    for r in rows {
        w.write_record([
            r.trait_category.as_str(),
            &r.trait_value,
            &r.genre.to_string(),
            &r.active_uses.to_string(),
            &r.passive_uses.to_string(),
            &format!("{:.4}", r.active_proportion),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const BAR_WIDTH: usize = 40;

/// Markdown rendering with one 40-cell bar per row: `█` for the active share,
/// `░` for the passive share. Empty rows get a blank bar and a `(no uses)` tag.
pub fn render_bars(rows: &[DistributionRow]) -> String {
    let mut out = String::new();
    let mut current: Option<(TraitCategory, GenreKey)> = None;
    let mut grouped: Vec<&DistributionRow> = rows.iter().collect();
    grouped.sort_by(|a, b| {
        (a.genre, a.trait_category, &a.trait_value).cmp(&(
            b.genre,
            b.trait_category,
            &b.trait_value,
        ))
    });
    let label_width = rows
        .iter()
        .map(|r| r.trait_value.chars().count())
        .max()
        .unwrap_or(0);

    for r in grouped {
        if current != Some((r.trait_category, r.genre)) {
            if current.is_some() {
                out.push_str("```\n\n");
            }
            let _ = writeln!(out, "### {} ({})\n\n```", r.trait_category, r.genre);
            current = Some((r.trait_category, r.genre));
        }
        let filled = if r.is_empty() {
            0
        } else {
            (r.active_proportion * BAR_WIDTH as f64).round() as usize
        };
        let bar: String = if r.is_empty() {
            " ".repeat(BAR_WIDTH)
        } else {
            "█".repeat(filled) + &"░".repeat(BAR_WIDTH - filled)
        };
        let _ = write!(
            out,
            "{:<label_width$}  {bar}  {:>5.1}% active  ({}/{})",
            r.trait_value,
            100.0 * r.active_proportion,
            r.active_uses,
            r.total_uses(),
        );
        if r.is_empty() {
            out.push_str("  (no uses)");
        }
        out.push('\n');
    }
    if current.is_some() {
        out.push_str("```\n");
    }
    out
}
