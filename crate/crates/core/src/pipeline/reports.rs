//! CSV reports for the metric and SI/TI commands.

use std::io::Write;

use crate::metrics::{MetricScore, SiTiResult};

/// One row per frame, one column per metric, full precision.
pub fn render_metric_frames(scores: &[MetricScore], out: &mut impl Write) -> std::io::Result<()> {
    write!(out, "frame")?;
    for s in scores {
        write!(out, ",{}", s.metric_name)?;
    }
    writeln!(out)?;
    let frames = scores.first().map_or(0, |s| s.per_frame.len());
    for f in 0..frames {
        write!(out, "{f}")?;
        for s in scores {
            write!(out, ",{}", s.per_frame[f])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// One row per metric with its temporal mean.
pub fn render_metric_pooled(scores: &[MetricScore], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "metric,pooled,frames,capped_frames")?;
    for s in scores {
        writeln!(
            out,
            "{},{},{},{}",
            s.metric_name,
            s.pooled,
            s.per_frame.len(),
            s.capped_frames
        )?;
    }
    Ok(())
}

/// Long format: an `si` row for every frame and a `ti` row for every frame
/// that has a predecessor.
pub fn render_siti_frames(r: &SiTiResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "measure,frame,value")?;
    for (f, v) in r.per_frame_si.iter().enumerate() {
        writeln!(out, "si,{f},{v}")?;
    }
    for (f, v) in r.per_frame_ti.iter().enumerate() {
        writeln!(out, "ti,{},{v}", f + 1)?;
    }
    Ok(())
}

pub fn render_siti_pooled(r: &SiTiResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "si,ti,ti_defined,frames")?;
    writeln!(
        out,
        "{},{},{},{}",
        r.si,
        r.ti,
        r.ti_defined,
        r.per_frame_si.len()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_tables() {
        let scores = vec![
            MetricScore::from_frames("psnr", vec![30.0, 40.0]),
            MetricScore::from_frames("ssim", vec![0.9, 0.95]),
        ];
        let mut buf = Vec::new();
        render_metric_frames(&scores, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "frame,psnr,ssim\n0,30,0.9\n1,40,0.95\n"
        );
        let mut buf = Vec::new();
        render_metric_pooled(&scores, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("psnr,35,2,0"));
    }

    #[test]
    fn single_frame_siti_has_no_ti_rows() {
        let r = SiTiResult {
            si: 4.0,
            ti: 0.0,
            ti_defined: false,
            per_frame_si: vec![4.0],
            per_frame_ti: vec![],
        };
        let mut buf = Vec::new();
        render_siti_frames(&r, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "measure,frame,value\nsi,0,4\n"
        );
        let mut buf = Vec::new();
        render_siti_pooled(&r, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("4,0,false,1\n"));
    }
}
