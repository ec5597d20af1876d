//! File writers. Every number is printed with 17 significant digits so the
//! files read back bit for bit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use bipi::packing::IterationRecord;
use bipi::wcsph::{FluidState, Sample};
use bipi::{BoundarySet, ParticleSet, Vec2};

pub const PARTICLE_HEADER: &str = "id,x1,x2,gamma,C,gradC1,gradC2,frozen,packable";
pub const METRICS_HEADER: &str = "phase,iter,tpd_avg,gradc_avg,n_pack";

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_particles_csv<W: Write>(set: &ParticleSet, mut w: W) -> io::Result<()> {
    writeln!(w, "{PARTICLE_HEADER}")?;
    for i in 0..set.len() {
        let x = set.position[i];
        let g = set.grad_c[i];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            i,
            num(x.x1),
            num(x.x2),
            num(set.gamma[i]),
            num(set.c[i]),
            num(g.x1),
            num(g.x2),
            set.frozen[i] as u8,
            set.packable[i] as u8
        )?;
    }
    Ok(())
}

pub fn write_particles_csv_file(set: &ParticleSet, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_particles_csv(set, &mut w)?;
    w.flush()
}

/// Positions from a particle CSV written by [`write_particles_csv`].
pub fn read_positions_csv(text: &str) -> Result<Vec<Vec2>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == PARTICLE_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 9 {
                return Err(format!("row {}: expected 9 columns, got {}", i + 1, cols.len()));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1));
            Ok(Vec2::new(parse(cols[1])?, parse(cols[2])?))
        })
        .collect()
}

/// Legacy ASCII VTK polydata with `gamma` and `gradC_mag` point scalars.
pub fn write_vtk<W: Write>(set: &ParticleSet, mut w: W) -> io::Result<()> {
    let n = set.len();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "bipi particles")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {n} double")?;
    for x in &set.position {
        writeln!(w, "{} {} 0", num(x.x1), num(x.x2))?;
    }
    writeln!(w, "VERTICES {} {}", n, 2 * n)?;
    for i in 0..n {
        writeln!(w, "1 {i}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    writeln!(w, "SCALARS gamma double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for g in &set.gamma {
        writeln!(w, "{}", num(*g))?;
    }
    writeln!(w, "SCALARS gradC_mag double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for g in &set.grad_c {
        writeln!(w, "{}", num(g.norm()))?;
    }
    Ok(())
}

pub fn write_vtk_file(set: &ParticleSet, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_vtk(set, &mut w)?;
    w.flush()
}

pub fn write_metrics_csv<W: Write>(records: &[IterationRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{METRICS_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.phase,
            r.iter,
            num(r.tpd_avg),
            num(r.gradc_avg),
            r.n_pack
        )?;
    }
    Ok(())
}

pub fn write_metrics_csv_file(records: &[IterationRecord], path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_metrics_csv(records, &mut w)?;
    w.flush()
}

pub fn write_fluid_csv<W: Write>(state: &FluidState, mut w: W) -> io::Result<()> {
    writeln!(w, "id,x1,x2,v1,v2,rho,p")?;
    for i in 0..state.len() {
        let (x, v) = (state.position[i], state.velocity[i]);
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            i,
            num(x.x1),
            num(x.x2),
            num(v.x1),
            num(v.x2),
            num(state.rho[i]),
            num(state.p[i])
        )?;
    }
    Ok(())
}

pub fn write_fluid_csv_file(state: &FluidState, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_fluid_csv(state, &mut w)?;
    w.flush()
}

pub fn write_timeseries_csv<W: Write>(samples: &[Sample], mut w: W) -> io::Result<()> {
    writeln!(w, "t,kinetic_energy,max_density_excursion")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{}",
            num(s.t),
            num(s.kinetic_energy),
            num(s.max_density_excursion)
        )?;
    }
    Ok(())
}

pub fn write_timeseries_csv_file(samples: &[Sample], path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    write_timeseries_csv(samples, &mut w)?;
    w.flush()
}

/// Field shown by [`render_svg_scatter`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorField {
    GradCMag,
    Gamma,
}

const STOPS: [(u8, u8, u8); 5] = [
    (0x44, 0x01, 0x54),
    (0x3b, 0x52, 0x8b),
    (0x21, 0x91, 0x8c),
    (0x5e, 0xc9, 0x62),
    (0xfd, 0xe7, 0x25),
];

/// Color for `log10(value)` clamped to `[-8, 0]`, linear between five stops.
pub fn color(value: f64) -> String {
    let l = if value > 0.0 { value.log10() } else { -8.0 };
    let t = (l.clamp(-8.0, 0.0) + 8.0) / 8.0;
    let pos = t * (STOPS.len() - 1) as f64;
    let k = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - k as f64;
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    format!("#{:02x}{:02x}{:02x}", lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

/// Standalone SVG scatter in geometry units, `x2` pointing up.
pub fn render_svg_scatter<W: Write>(set: &ParticleSet, boundary: &BoundarySet, field: ColorField, mut w: W) -> io::Result<()> {
    let bb = boundary.bbox();
    let pad = 0.05 * bb.width().max(bb.height());
    let (x0, y0) = (bb.min.x1 - pad, -(bb.max.x2 + pad));
    let (width, height) = (bb.width() + 2.0 * pad, bb.height() + 2.0 * pad);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.6} {y0:.6} {width:.6} {height:.6}">"#
    )?;
    let stroke = 0.1 * set.dx;
    for lp in boundary.loops() {
        let mut pts: Vec<String> = lp.vertices.iter().map(|v| format!("{:.6},{:.6}", v.x1, -v.x2)).collect();
        if let Some(first) = pts.first().cloned() {
            pts.push(first);
        }
        writeln!(
            w,
            r#"<polyline fill="none" stroke="black" stroke-width="{stroke:.6}" points="{}"/>"#,
            pts.join(" ")
        )?;
    }
    let r = 0.4 * set.dx;
    for i in 0..set.len() {
        let v = match field {
            ColorField::GradCMag => set.grad_c[i].norm(),
            ColorField::Gamma => set.gamma[i],
        };
        let x = set.position[i];
        writeln!(
            w,
            r#"<circle cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="{}"/>"#,
            x.x1,
            -x.x2,
            color(v)
        )?;
    }
    writeln!(w, "</svg>")
}

pub fn render_svg_scatter_file(set: &ParticleSet, boundary: &BoundarySet, field: ColorField, path: &Path) -> io::Result<()> {
    let mut w = create(path)?;
    render_svg_scatter(set, boundary, field, &mut w)?;
    w.flush()
}
