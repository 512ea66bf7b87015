//! Trajectory CSV writing and parsing.
//!
//! Fixed column order, full-precision `{:.16e}` rendering (17 significant
//! digits), so a parsed file reproduces the simulated values bit-exactly
//! and every summary quantity can be recomputed from the file alone.

use std::io::{self, Write};
use std::path::Path;

use pointlock::{
    linalg::{Mat3, Vec3},
    se3::Rotation,
    RigidBodyState, TrajectorySample,
};

/// Column order of a trajectory CSV.
pub const TRAJECTORY_HEADER: &str = "t,p_x,p_y,p_z,R_11,R_12,R_13,R_21,R_22,R_23,R_31,R_32,R_33,\
v_x,v_y,v_z,O_1,O_2,O_3,f,tau_2,tau_3,mu_z,mu_O3,mu_O2,e_pt,e_z,s3,rho";

fn push_num(line: &mut String, value: f64) {
    line.push(',');
    line.push_str(&format!("{value:.16e}"));
}

/// Render one sample as a CSV line (no trailing newline).
pub fn sample_line(sample: &TrajectorySample) -> String {
    let s = &sample.state;
    let r = s.rotation.matrix();
    let mut line = format!("{:.16e}", sample.t);
    for v in [s.position.x, s.position.y, s.position.z] {
        push_num(&mut line, v);
    }
    for i in 0..3 {
        for j in 0..3 {
            push_num(&mut line, r[(i, j)]);
        }
    }
    for v in [s.velocity.x, s.velocity.y, s.velocity.z] {
        push_num(&mut line, v);
    }
    for v in [
        s.angular_velocity.x,
        s.angular_velocity.y,
        s.angular_velocity.z,
    ] {
        push_num(&mut line, v);
    }
    push_num(&mut line, sample.input.thrust);
    push_num(&mut line, sample.input.torque.y);
    push_num(&mut line, sample.input.torque.z);
    push_num(&mut line, sample.residuals.mu_z);
    push_num(&mut line, sample.residuals.mu_o3);
    push_num(&mut line, sample.residuals.mu_o2);
    push_num(&mut line, sample.errors.e_pt);
    push_num(&mut line, sample.errors.e_z);
    push_num(&mut line, sample.regularity.s3);
    push_num(&mut line, sample.regularity.rho);
    line
}

/// Write a full trajectory file.
pub fn write_trajectory(path: &Path, samples: &[TrajectorySample]) -> io::Result<()> {
    let mut out = String::with_capacity(samples.len() * 640 + 256);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for sample in samples {
        out.push_str(&sample_line(sample));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// One parsed CSV row.
#[derive(Clone, Copy, Debug)]
pub struct CsvRow {
    pub t: f64,
    pub state: RigidBodyState,
    pub thrust: f64,
    pub tau_2: f64,
    pub tau_3: f64,
    pub mu_z: f64,
    pub mu_o3: f64,
    pub mu_o2: f64,
    pub e_pt: f64,
    pub e_z: f64,
    pub s3: f64,
    pub rho: f64,
}

/// Parse a trajectory CSV produced by [`write_trajectory`].
pub fn parse_trajectory(path: &Path) -> io::Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty csv"))?;
    if header != TRAJECTORY_HEADER {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "unexpected csv header",
        ));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("line {}: {e}", lineno + 2),
                )
            })?;
        if fields.len() != 29 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("line {}: expected 29 fields, got {}", lineno + 2, fields.len()),
            ));
        }
        let rotation = Rotation::from_matrix_unchecked(Mat3::new(
            fields[4], fields[5], fields[6], fields[7], fields[8], fields[9], fields[10],
            fields[11], fields[12],
        ));
        rows.push(CsvRow {
            t: fields[0],
            state: RigidBodyState::new(
                rotation,
                Vec3::new(fields[1], fields[2], fields[3]),
                Vec3::new(fields[13], fields[14], fields[15]),
                Vec3::new(fields[16], fields[17], fields[18]),
            ),
            thrust: fields[19],
            tau_2: fields[20],
            tau_3: fields[21],
            mu_z: fields[22],
            mu_o3: fields[23],
            mu_o2: fields[24],
            e_pt: fields[25],
            e_z: fields[26],
            s3: fields[27],
            rho: fields[28],
        });
    }
    Ok(rows)
}
