use std::io::{BufRead, Write};

use super::Trajectory;
use crate::error::{Error, Result};

fn header(dim: usize) -> String {
    let mut h = String::from("i,t,eps,f");
    for k in 0..dim {
        h.push_str(&format!(",x{k}"));
    }
    for k in 0..dim {
        h.push_str(&format!(",v{k}"));
    }
    h
}

/// Writes one row per stored iterate with 17 significant digits, which
/// round-trips every `f64` exactly.
pub fn write_csv<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    writeln!(w, "{}", header(traj.dim()))?;
    let mut line = String::new();
    for r in 0..traj.len() {
        line.clear();
        line.push_str(&traj.index(r).to_string());
        for v in [traj.time(r), traj.step(r), traj.value(r)]
            .into_iter()
            .chain(traj.point(r).iter().copied())
            .chain(traj.velocity(r).iter().copied())
        {
            line.push_str(&format!(",{v:.16e}"));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory written by [`write_csv`].
///
/// The stride is inferred from the index column. Exact aggregates are only
/// recovered for dense files.
pub fn read_csv<R: BufRead>(r: R) -> Result<Trajectory> {
    let mut lines = r.lines();
    let head = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let cols: Vec<&str> = head.trim().split(',').collect();
    if cols.len() < 6 || cols[..4] != ["i", "t", "eps", "f"] || !(cols.len() - 4).is_multiple_of(2) {
        return Err(Error::Parse(format!("unexpected header `{}`", head.trim())));
    }
    let dim = (cols.len() - 4) / 2;
    if head.trim() != header(dim) {
        return Err(Error::Parse(format!("unexpected header `{}`", head.trim())));
    }

    let (mut points, mut velocities) = (Vec::new(), Vec::new());
    let (mut steps, mut times, mut values) = (Vec::new(), Vec::new(), Vec::new());
    let mut indices = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, found {}",
                lineno + 2,
                cols.len(),
                fields.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 2));
        indices.push(fields[0].parse::<usize>().map_err(|_| bad("index"))?);
        let nums = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| bad("number"))?;
        times.push(nums[0]);
        steps.push(nums[1]);
        values.push(nums[2]);
        points.extend_from_slice(&nums[3..3 + dim]);
        velocities.extend_from_slice(&nums[3 + dim..]);
    }
    if indices.is_empty() {
        return Err(Error::Parse("no iterates".into()));
    }
    if indices[0] != 0 {
        return Err(Error::Parse("the first stored iterate must have index 0".into()));
    }
    let thin = indices.get(1).copied().unwrap_or(1);
    if thin == 0 || indices.iter().enumerate().any(|(r, &i)| i != r * thin) {
        return Err(Error::Parse("iterate indices are not evenly spaced".into()));
    }
    Ok(Trajectory::from_flat_rows(dim, thin, points, velocities, steps, times, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, RunOptions, StepSchedule};
    use crate::funcs::{builtin, Builtin, SelectionKind, SelectionPolicy};

    #[test]
    fn csv_round_trip_is_exact() {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 0.5, 1).unwrap();
        let p = SelectionPolicy::new(SelectionKind::RandomHull, 3);
        let t = run(f.as_ref(), &[0.3, -0.7], s, p, 500, &RunOptions::for_dimension(2)).unwrap();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,t,eps,f,x0,x1,v0,v1\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.points_flat(), t.points_flat());
        assert_eq!(back.times(), t.times());
        assert_eq!(back.steps(), t.steps());
        assert_eq!(back.values(), t.values());
        assert_eq!(back.aggregates().unwrap().next_point, t.aggregates().unwrap().next_point);
    }

    #[test]
    fn thinned_round_trip_keeps_stride() {
        let f = builtin(Builtin::Abs1d);
        let s = StepSchedule::new(0.5, 1.0, 1).unwrap();
        let opts = RunOptions::for_dimension(1).with_thin(4);
        let t = run(f.as_ref(), &[1.0], s, SelectionPolicy::default(), 40, &opts).unwrap();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.thin(), 4);
        assert!(back.aggregates().is_none());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("i,t,eps,f,x0,v0\n0,1,1\n".as_bytes()).is_err());
        assert!(read_csv("i,t,eps,f,x0,v0\n0,1,1,1,a,1\n".as_bytes()).is_err());
        assert!(read_csv("a,b\n".as_bytes()).is_err());
        assert!(read_csv("i,t,eps,f,x0,v0\n1,1,1,1,1,1\n".as_bytes()).is_err());
    }
}
