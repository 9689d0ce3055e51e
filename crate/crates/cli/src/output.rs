//! CSV and report writers. Floats in CSV files carry 17 significant digits;
//! the report carries 8.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use dipcone::{FrontTrace, Observable, ObservableSeries, Trajectory};

use crate::config::render_config;
use crate::experiment::{RunManifest, ENERGY_TOLERANCE, NORM_TOLERANCE};

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new)
}

pub(crate) fn write_snapshots(path: &Path, traj: &Trajectory) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,site,sx,sy,sz")?;
    for (t, chain) in traj.times.iter().zip(&traj.snapshots) {
        for (i, s) in chain.spins().iter().enumerate() {
            writeln!(w, "{t:.16e},{},{:.16e},{:.16e},{:.16e}", i + 1, s.x(), s.y(), s.z())?;
        }
    }
    w.flush()
}

pub(crate) fn write_observables(path: &Path, series: &ObservableSeries) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,site,one_minus_F,S_N")?;
    let f = series.matrix(Observable::OneMinusFidelity);
    let n = series.matrix(Observable::NormalComponent);
    for (ti, t) in series.times().iter().enumerate() {
        for site in 1..=f.n_sites() {
            writeln!(w, "{t:.16e},{site},{:.16e},{:.16e}", f.at(ti, site), n.at(ti, site))?;
        }
    }
    w.flush()
}

pub(crate) fn write_front(path: &Path, trace: &FrontTrace) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x_left,x_right")?;
    for (i, t) in trace.times.iter().enumerate() {
        writeln!(w, "{t:.16e},{:.16e},{:.16e}", trace.x_left(i), trace.x_right(i))?;
    }
    w.flush()
}

fn sig8(x: f64) -> String {
    format!("{x:.7e}")
}

pub(crate) fn write_report(path: &Path, m: &RunManifest) -> io::Result<()> {
    let mut w = create(path)?;
    let c = &m.config;
    let cons = &m.conservation;
    let fit = &m.fit;

    writeln!(w, "dipcone {} run report", m.version)?;
    writeln!(w)?;
    writeln!(w, "{} chain, {} sites, alpha {}, C_M {}", c.preset, c.n_sites, c.alpha, c.c_m)?;
    writeln!(w, "{} steps to t = {}, {} snapshots", m.steps_taken, c.t_end, m.n_snapshots)?;
    writeln!(w)?;
    writeln!(w, "conservation (limits: norm {NORM_TOLERANCE:e}, energy {ENERGY_TOLERANCE:e})")?;
    writeln!(w, "  norm drift        {} at snapshots, {} over all steps", sig8(cons.max_norm_drift), sig8(cons.max_norm_drift_all_steps))?;
    writeln!(w, "  energy drift      {} at snapshots, {} over all steps", sig8(cons.max_energy_drift), sig8(cons.max_energy_drift_all_steps))?;
    writeln!(w, "  status            {}", if cons.ok() { "ok" } else { "VIOLATED" })?;
    writeln!(w)?;
    writeln!(w, "front")?;
    for line in fit.to_string().lines() {
        writeln!(w, "  {line}")?;
    }
    match fit.end_contact {
        Some(t) => writeln!(w, "  end contact       t = {}", sig8(t))?,
        None => writeln!(w, "  end contact       none")?,
    }
    if let Some(master) = &m.master {
        match master {
            Ok(p) => writeln!(
                w,
                "  master plot       coefficient ~ {} * x^{} ({} sites, {} excluded)",
                sig8(p.prefactor),
                sig8(p.distance_exponent),
                p.entries.len(),
                p.excluded.len()
            )?,
            Err(why) => writeln!(w, "  master plot       skipped: {why}")?,
        }
    }

    writeln!(w)?;
    writeln!(w, "[config]")?;
    w.write_all(render_config(c).as_bytes())?;
    writeln!(w)?;
    writeln!(w, "[summary]")?;
    writeln!(w, "version={}", m.version)?;
    let files: Vec<String> =
        m.files.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect();
    writeln!(w, "files={}", files.join(","))?;
    writeln!(w, "steps={}", m.steps_taken)?;
    writeln!(w, "snapshots={}", m.n_snapshots)?;
    writeln!(w, "initial_energy={}", sig8(m.initial_energy))?;
    writeln!(w, "max_norm_drift={}", sig8(cons.max_norm_drift))?;
    writeln!(w, "max_energy_drift={}", sig8(cons.max_energy_drift))?;
    writeln!(w, "max_norm_drift_all_steps={}", sig8(cons.max_norm_drift_all_steps))?;
    writeln!(w, "max_energy_drift_all_steps={}", sig8(cons.max_energy_drift_all_steps))?;
    writeln!(w, "conservation_ok={}", cons.ok())?;
    writeln!(w, "observable={}", fit.observable)?;
    writeln!(w, "contour_level={}", sig8(fit.contour_level))?;
    match &fit.precursor {
        Ok(p) => {
            writeln!(w, "precursor_A={}", sig8(p.amplitude))?;
            writeln!(w, "precursor_beta={}", sig8(p.exponent))?;
            writeln!(w, "precursor_points={}", p.points)?;
        }
        Err(why) => writeln!(w, "precursor=skipped ({why})")?,
    }
    match &fit.linear {
        Ok(l) => {
            writeln!(w, "linear_B={}", sig8(l.intercept))?;
            writeln!(w, "linear_v_s={}", sig8(l.speed))?;
            writeln!(w, "linear_v_s_stderr={}", sig8(l.speed_stderr))?;
            writeln!(w, "linear_points={}", l.points)?;
            writeln!(w, "linear_window={},{}", sig8(fit.linear_window.start), sig8(fit.linear_window.end))?;
        }
        Err(why) => writeln!(w, "linear=skipped ({why})")?,
    }
    match fit.b_predicted() {
        Some(b) => writeln!(w, "predicted_B={}", sig8(b))?,
        None => writeln!(w, "predicted_B=n/a")?,
    }
    if let Some(t) = fit.end_contact {
        writeln!(w, "end_contact={}", sig8(t))?;
    }
    if let Some(master) = &m.master {
        match master {
            Ok(p) => writeln!(w, "master_exponent={}", sig8(p.distance_exponent))?,
            Err(why) => writeln!(w, "master_exponent=skipped ({why})")?,
        }
    }
    w.flush()
}
