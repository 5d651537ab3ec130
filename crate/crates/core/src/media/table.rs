//! Feature tables: one row per stimulus with audio/video metric scores and
//! the subjective audiovisual MOS.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::MediaError;

pub const CONTENT_COLUMN: &str = "content_id";
pub const CONDITION_COLUMN: &str = "condition_id";
pub const MOS_COLUMN: &str = "mos_av";

/// Audio metric columns expected when no schema is given.
pub const DEFAULT_AUDIO_METRICS: [&str; 3] = ["peaq", "visqol", "ambiqual"];

pub const MOS_MIN: f64 = 1.0;
pub const MOS_MAX: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub content_id: String,
    pub condition_id: String,
    /// Scores in the order of [`FeatureTable::audio_names`].
    pub audio_scores: Vec<f64>,
    /// Scores in the order of [`FeatureTable::video_names`].
    pub video_scores: Vec<f64>,
    pub mos_av: f64,
}

/// Which columns of a feature CSV are audio metrics and which are video
/// metrics. `video: None` takes every remaining numeric column in header order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSchema {
    pub audio: Vec<String>,
    pub video: Option<Vec<String>>,
}

impl Default for TableSchema {
    fn default() -> Self {
        Self {
            audio: DEFAULT_AUDIO_METRICS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            video: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub audio_names: Vec<String>,
    pub video_names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Builds a table, enforcing the row invariants.
    pub fn new(
        audio_names: Vec<String>,
        video_names: Vec<String>,
        rows: Vec<FeatureRow>,
    ) -> Result<Self, MediaError> {
        let mut seen = HashSet::new();
        for (idx, row) in rows.iter().enumerate() {
            if row.audio_scores.len() != audio_names.len()
                || row.video_scores.len() != video_names.len()
            {
                return Err(MediaError::RowShape { row: idx + 1 });
            }
            if !(MOS_MIN..=MOS_MAX).contains(&row.mos_av) {
                return Err(MediaError::MosRange {
                    row: idx + 1,
                    value: row.mos_av,
                });
            }
            if !seen.insert((row.content_id.as_str(), row.condition_id.as_str())) {
                return Err(MediaError::DuplicateKey {
                    content_id: row.content_id.clone(),
                    condition_id: row.condition_id.clone(),
                });
            }
        }
        Ok(Self {
            audio_names,
            video_names,
            rows,
        })
    }

    pub fn audio_index(&self, name: &str) -> Option<usize> {
        self.audio_names.iter().position(|n| n == name)
    }

    pub fn video_index(&self, name: &str) -> Option<usize> {
        self.video_names.iter().position(|n| n == name)
    }

    /// Distinct content ids in order of first appearance.
    pub fn contents(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.rows
            .iter()
            .map(|r| r.content_id.as_str())
            .filter(|c| seen.insert(*c))
            .collect()
    }
}

/// Loads a feature CSV with the default schema (three audio columns named
/// `peaq`, `visqol`, `ambiqual`; every other metric column is video).
pub fn load_feature_table(path: impl AsRef<Path>) -> Result<FeatureTable, MediaError> {
    load_feature_table_with(path, &TableSchema::default())
}

pub fn load_feature_table_with(
    path: impl AsRef<Path>,
    schema: &TableSchema,
) -> Result<FeatureTable, MediaError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| MediaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_feature_table(file, schema)
}

pub fn parse_feature_table(
    input: impl std::io::Read,
    schema: &TableSchema,
) -> Result<FeatureTable, MediaError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| MediaError::MissingColumn(name.to_string()))
    };
    let content_col = find(CONTENT_COLUMN)?;
    let condition_col = find(CONDITION_COLUMN)?;
    let mos_col = find(MOS_COLUMN)?;
    let audio_cols = schema
        .audio
        .iter()
        .map(|n| find(n))
        .collect::<Result<Vec<_>, _>>()?;
    let video_names: Vec<String> = match &schema.video {
        Some(names) => names.clone(),
        None => header
            .iter()
            .filter(|h| {
                ![CONTENT_COLUMN, CONDITION_COLUMN, MOS_COLUMN].contains(&h.as_str())
                    && !schema.audio.contains(h)
            })
            .cloned()
            .collect(),
    };
    let video_cols = video_names
        .iter()
        .map(|n| find(n))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        let number = |col: usize| -> Result<f64, MediaError> {
            let raw = record.get(col).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(MediaError::NonNumeric {
                    line,
                    column: header[col].clone(),
                    value: raw.to_string(),
                }),
            }
        };
        let mos_av = number(mos_col)?;
        if !(MOS_MIN..=MOS_MAX).contains(&mos_av) {
            return Err(MediaError::MosRange {
                row: idx + 1,
                value: mos_av,
            });
        }
        rows.push(FeatureRow {
            content_id: record.get(content_col).unwrap_or("").to_string(),
            condition_id: record.get(condition_col).unwrap_or("").to_string(),
            audio_scores: audio_cols
                .iter()
                .map(|&c| number(c))
                .collect::<Result<_, _>>()?,
            video_scores: video_cols
                .iter()
                .map(|&c| number(c))
                .collect::<Result<_, _>>()?,
            mos_av,
        });
    }
    FeatureTable::new(schema.audio.clone(), video_names, rows)
}

/// Writes a feature table at full precision: reading it back reproduces
/// every value bit for bit.
pub fn write_feature_table(table: &FeatureTable, path: impl AsRef<Path>) -> Result<(), MediaError> {
    let path = path.as_ref();
    let mut out = Vec::new();
    render_feature_table(table, &mut out).expect("writing to memory");
    std::fs::write(path, out).map_err(|source| MediaError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn render_feature_table(table: &FeatureTable, out: &mut impl Write) -> std::io::Result<()> {
    let mut header = vec![CONTENT_COLUMN, CONDITION_COLUMN];
    header.extend(table.audio_names.iter().map(String::as_str));
    header.extend(table.video_names.iter().map(String::as_str));
    header.push(MOS_COLUMN);
    writeln!(out, "{}", header.join(","))?;
    for row in &table.rows {
        write!(out, "{},{}", row.content_id, row.condition_id)?;
        for v in row.audio_scores.iter().chain(&row.video_scores) {
            write!(out, ",{v}")?;
        }
        writeln!(out, ",{}", row.mos_av)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn header() -> String {
        "content_id,condition_id,peaq,visqol,ambiqual,psnr,vmaf,mos_av\n".to_string()
    }

    fn table_text(contents: usize, conditions: usize) -> String {
        let mut s = header();
        for c in 0..contents {
            for k in 0..conditions {
                s.push_str(&format!(
                    "s{c},q{k},-1.{k},3.{c},0.{k}5,3{k}.5,8{c}.0,{}\n",
                    1.0 + (c + k) as f64 * 0.3
                ));
            }
        }
        s
    }

    #[test]
    fn loads_forty_rows() {
        let t = parse_feature_table(table_text(5, 8).as_bytes(), &TableSchema::default()).unwrap();
        assert_eq!(t.rows.len(), 40);
        assert_eq!(t.video_names, ["psnr", "vmaf"]);
        assert_eq!(t.contents().len(), 5);
    }

    #[test]
    fn mos_out_of_range() {
        let text = header() + "a,b,1,2,3,4,5,5.7\n";
        let err = parse_feature_table(text.as_bytes(), &TableSchema::default()).unwrap_err();
        assert!(matches!(err, MediaError::MosRange { value, .. } if value == 5.7));
    }

    #[test]
    fn missing_audio_column() {
        let text = "content_id,condition_id,peaq,visqol,psnr,mos_av\na,b,1,2,3,4\n";
        let err = parse_feature_table(text.as_bytes(), &TableSchema::default()).unwrap_err();
        assert!(matches!(err, MediaError::MissingColumn(ref c) if c == "ambiqual"));
    }

    #[test]
    fn non_numeric_and_duplicates() {
        let text = header() + "a,b,1,x,3,4,5,3\n";
        let err = parse_feature_table(text.as_bytes(), &TableSchema::default()).unwrap_err();
        assert!(
            matches!(err, MediaError::NonNumeric { line: 2, ref column, .. } if column == "visqol")
        );

        let text = header() + "a,b,1,2,3,4,5,3\na,b,1,2,3,4,5,3\n";
        let err = parse_feature_table(text.as_bytes(), &TableSchema::default()).unwrap_err();
        assert!(matches!(err, MediaError::DuplicateKey { .. }));
    }

    #[test]
    fn explicit_video_order_is_kept() {
        let schema = TableSchema {
            audio: vec!["ambiqual".into()],
            video: Some(vec!["vmaf".into(), "psnr".into()]),
        };
        let t = parse_feature_table(table_text(2, 2).as_bytes(), &schema).unwrap();
        assert_eq!(t.video_names, ["vmaf", "psnr"]);
        assert_eq!(t.rows[0].video_scores, [80.0, 30.5]);
    }

    proptest! {
        #[test]
        fn write_read_is_bit_exact(values in proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6, 1.0f64..=5.0), 1..20)) {
            let rows = values.iter().enumerate().map(|(i, &(a, v, m))| FeatureRow {
                content_id: format!("c{}", i % 3),
                condition_id: format!("k{i}"),
                audio_scores: vec![a, a / 3.0, a * 1e-7],
                video_scores: vec![v],
                mos_av: m,
            }).collect();
            let table = FeatureTable::new(
                DEFAULT_AUDIO_METRICS.iter().map(|s| s.to_string()).collect(),
                vec!["psnr".into()],
                rows,
            ).unwrap();
            let mut buf = Vec::new();
            render_feature_table(&table, &mut buf).unwrap();
            let back = parse_feature_table(buf.as_slice(), &TableSchema::default()).unwrap();
            prop_assert_eq!(back, table);
        }
    }
}
