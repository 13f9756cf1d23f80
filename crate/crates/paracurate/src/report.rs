//! Score-distribution reports and histogram plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use paracurate_core::stats::render_table;
use paracurate_core::{Annotation, GroupBy, ScoreDistribution, ScoreTally};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::thread_pool;
use crate::error::{io_err, Error};
use crate::shards::{read_records, shard_files, write_json};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub group_by: &'static str,
    pub total: u64,
    pub distributions: Vec<ScoreDistribution>,
}

fn tally_file(path: &Path, group_by: GroupBy) -> Result<ScoreTally, Error> {
    let mut tally = ScoreTally::new(group_by);
    for annotation in read_records::<Annotation>(path)? {
        tally.add(&annotation?);
    }
    Ok(tally)
}

/// Tallies every annotation shard on `jobs` workers and merges the counts.
pub fn stats_dir(annotation_dir: &Path, group_by: GroupBy, jobs: usize) -> Result<StatsReport, Error> {
    let files = shard_files(annotation_dir)?;
    let tallies: Vec<ScoreTally> = if jobs <= 1 {
        files
            .iter()
            .map(|f| tally_file(f, group_by))
            .collect::<Result<_, _>>()?
    } else {
        thread_pool(jobs).install(|| {
            files
                .par_iter()
                .map(|f| tally_file(f, group_by))
                .collect::<Result<_, _>>()
        })?
    };
    let tally = tallies.iter().fold(ScoreTally::new(group_by), |acc, t| acc.merge(t));
    Ok(StatsReport {
        group_by: group_by.as_str(),
        total: tally.population(),
        distributions: tally.finish()?,
    })
}

/// Writes `path` as JSON and the aligned table next to it as `.txt`.
pub fn write_report(report: &StatsReport, path: &Path) -> Result<PathBuf, Error> {
    write_json(path, report)?;
    let table_path = path.with_extension("txt");
    fs::write(&table_path, render_table(&report.distributions)).map_err(io_err(&table_path))?;
    Ok(table_path)
}

const WIDTH: f64 = 360.0;
const HEIGHT: f64 = 240.0;
const MARGIN: f64 = 36.0;

/// A bar chart of score shares for one group, as standalone SVG.
pub fn histogram_svg(d: &ScoreDistribution) -> String {
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let slot = plot_w / 5.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{} (n={}, mean {}, median {})</text>"#,
        WIDTH / 2.0,
        d.group_key,
        d.population,
        d.mean.render(2),
        d.median.render(2)
    );
    let baseline = HEIGHT - MARGIN;
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN}" y1="{baseline}" x2="{}" y2="{baseline}" stroke="#333"/>"##,
        WIDTH - MARGIN
    );
    for (score, share) in &d.shares {
        let h = share * plot_h;
        let x = MARGIN + f64::from(score - 1) * slot + slot * 0.15;
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="#4a7ab5"/>"##,
            baseline - h,
            slot * 0.7
        );
        let cx = x + slot * 0.35;
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{score}</text>"#,
            baseline + 14.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{:.1}%</text>"#,
            baseline - h - 4.0,
            share * 100.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// One `scores-<group>.svg` per distribution.
pub fn write_plots(report: &StatsReport, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    report
        .distributions
        .iter()
        .map(|d| {
            let path = dir.join(format!("scores-{}.svg", d.group_key));
            fs::write(&path, histogram_svg(d)).map_err(io_err(&path))?;
            Ok(path)
        })
        .collect()
}
