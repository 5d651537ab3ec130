//! PCC / SROCC / RMSE result tables.
//!
//! Each table has one row per (video metric, learner) and one value column
//! per (audio metric, CV scheme). Values are written with three decimals;
//! undefined correlations are written as `NA`.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::MediaError;
use crate::eval::EvalResult;
use crate::pipeline::GridResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultStat {
    Pcc,
    Srocc,
    Rmse,
}

impl ResultStat {
    pub const ALL: [ResultStat; 3] = [ResultStat::Pcc, ResultStat::Srocc, ResultStat::Rmse];

    pub fn file_name(self) -> &'static str {
        match self {
            ResultStat::Pcc => "pcc.csv",
            ResultStat::Srocc => "srocc.csv",
            ResultStat::Rmse => "rmse.csv",
        }
    }

    fn value(self, r: &EvalResult) -> Option<f64> {
        match self {
            ResultStat::Pcc => r.pcc,
            ResultStat::Srocc => r.srocc,
            ResultStat::Rmse => Some(r.rmse),
        }
    }
}

fn check_complete(grid: &GridResult) -> Result<(), MediaError> {
    if grid.axes.cell_count() == 0 {
        return Err(MediaError::EmptyGrid);
    }
    for key in grid.axes.cells() {
        if !grid.cells.contains_key(&key) {
            return Err(MediaError::IncompleteGrid(key.to_string()));
        }
    }
    Ok(())
}

pub fn render_result_table(
    grid: &GridResult,
    stat: ResultStat,
    out: &mut impl Write,
) -> Result<(), MediaError> {
    check_complete(grid)?;
    let axes = &grid.axes;
    let io = |source| MediaError::Io {
        path: PathBuf::from(stat.file_name()),
        source,
    };
    write!(out, "video_metric,learner").map_err(io)?;
    for audio in &axes.audio {
        for cv in &axes.cv {
            write!(out, ",{audio}_{cv}").map_err(io)?;
        }
    }
    writeln!(out).map_err(io)?;
    for video in &axes.video {
        for learner in &axes.learners {
            write!(out, "{video},{learner}").map_err(io)?;
            for audio in &axes.audio {
                for cv in &axes.cv {
                    let key = crate::pipeline::CellKey {
                        audio: audio.clone(),
                        video: video.clone(),
                        learner: *learner,
                        cv: *cv,
                    };
                    match stat.value(&grid.cells[&key]) {
                        Some(v) => write!(out, ",{v:.3}").map_err(io)?,
                        None => write!(out, ",NA").map_err(io)?,
                    }
                }
            }
            writeln!(out).map_err(io)?;
        }
    }
    Ok(())
}

/// Writes `pcc.csv`, `srocc.csv` and `rmse.csv` into `dir`.
pub fn write_result_tables(
    grid: &GridResult,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, MediaError> {
    check_complete(grid)?;
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| MediaError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for stat in ResultStat::ALL {
        let mut buf = Vec::new();
        render_result_table(grid, stat, &mut buf)?;
        let path = dir.join(stat.file_name());
        std::fs::write(&path, buf).map_err(|source| MediaError::Io {
            path: path.clone(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::CvKind;
    use crate::models::LearnerKind;
    use crate::pipeline::{CellKey, GridAxes};
    use std::collections::BTreeMap;

    fn axes(audio: usize, video: usize) -> GridAxes {
        GridAxes {
            audio: (0..audio).map(|i| format!("a{i}")).collect(),
            video: (0..video).map(|i| format!("v{i}")).collect(),
            learners: LearnerKind::ALL.to_vec(),
            cv: vec![CvKind::KFold, CvKind::LeaveOneContentOut],
        }
    }

    fn full(axes: GridAxes) -> GridResult {
        let cells: BTreeMap<_, _> = axes
            .cells()
            .into_iter()
            .enumerate()
            .map(|(i, k)| {
                (
                    k,
                    EvalResult {
                        pcc: Some(0.5 + i as f64 * 1e-4),
                        srocc: if i == 0 { None } else { Some(0.123456) },
                        rmse: 0.42,
                        n_test: 8,
                        folds: 1,
                        degenerate_folds: usize::from(i == 0),
                        cv_rmse: Some(0.5),
                    },
                )
            })
            .collect();
        GridResult {
            axes,
            cells,
            config_fingerprint: String::new(),
        }
    }

    #[test]
    fn full_grid_shape() {
        let grid = full(axes(3, 13));
        assert_eq!(grid.cells.len(), 312);
        let dir = tempfile::tempdir().unwrap();
        let paths = write_result_tables(&grid, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        for p in paths {
            let text = std::fs::read_to_string(p).unwrap();
            let lines: Vec<_> = text.lines().collect();
            assert_eq!(lines.len(), 1 + 52);
            for l in &lines {
                assert_eq!(l.split(',').count(), 2 + 6);
            }
        }
        let srocc = std::fs::read_to_string(dir.path().join("srocc.csv")).unwrap();
        assert!(srocc.lines().nth(1).unwrap().contains(",NA"));
        assert!(srocc.contains("0.123"));
    }

    #[test]
    fn empty_and_missing_cells() {
        let empty = GridResult {
            axes: axes(0, 0),
            cells: BTreeMap::new(),
            config_fingerprint: String::new(),
        };
        let mut buf = Vec::new();
        assert!(matches!(
            render_result_table(&empty, ResultStat::Pcc, &mut buf),
            Err(MediaError::EmptyGrid)
        ));

        let mut grid = full(axes(1, 2));
        let victim = CellKey {
            audio: "a0".into(),
            video: "v1".into(),
            learner: LearnerKind::Svm,
            cv: CvKind::KFold,
        };
        grid.cells.remove(&victim);
        let err = render_result_table(&grid, ResultStat::Rmse, &mut buf).unwrap_err();
        match err {
            MediaError::IncompleteGrid(name) => assert_eq!(name, victim.to_string()),
            other => panic!("{other}"),
        }
    }
}
