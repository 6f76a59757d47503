//! File formats.
//!
//! A dataset is one text header line
//!
//! ```text
//! MANIREG v1 <manifold> <dim> <rows> <cols>
//! ```
//!
//! followed by `rows · cols · coords` little-endian `f64` values, row-major by
//! pixel. `<manifold> <dim>` is `euclidean m`, `sphere n` or `spd3 3`; SPD
//! matrices are stored as 9 row-major entries, sphere points by their ambient
//! coordinates.
//!
//! A DWI directory holds `directions.txt` and one `euclidean 1` dataset per
//! direction, `dwi_000.mrg`, `dwi_001.mrg`, ...

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::dti::DwiStack;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::manifold::{Euclidean, Manifold, ManifoldKind, Spd3, Sphere};

pub const MAGIC: &str = "MANIREG";
pub const VERSION: &str = "v1";
pub const DIRECTIONS_FILE: &str = "directions.txt";
const DWI_MAGIC: &str = "MANIREG-DWI";

/// Decoded file contents: shape, manifold and flat coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: ManifoldKind,
    pub rows: usize,
    pub cols: usize,
    pub coords: Vec<f64>,
}

impl Dataset {
    pub fn from_image<M: Manifold>(m: &M, img: &Image<M::Point>) -> Self {
        let coords = img.as_slice().iter().flat_map(|p| m.coords(p)).collect();
        Self {
            kind: m.kind(),
            rows: img.rows(),
            cols: img.cols(),
            coords,
        }
    }

    /// Decodes the points for the backend `m`, which must match `kind`.
    pub fn to_image<M: Manifold>(&self, m: &M) -> Result<Image<M::Point>> {
        if m.kind() != self.kind {
            return Err(Error::Format(format!(
                "dataset holds `{}` points, expected `{}`",
                self.kind,
                m.kind()
            )));
        }
        let k = self.kind.coord_len();
        let points = self
            .coords
            .chunks_exact(k)
            .enumerate()
            .map(|(cell, c)| {
                m.from_coords(c).map_err(|e| Error::InvalidCell {
                    cell,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Image::new(self.rows, self.cols, points)
    }

    pub fn header(&self) -> String {
        format!(
            "{MAGIC} {VERSION} {} {} {} {}",
            self.kind.tag(),
            self.kind.header_dim(),
            self.rows,
            self.cols
        )
    }

    /// Checks every cell against the invariants of its manifold.
    pub fn validate(&self) -> Result<()> {
        if self.coords.len() != self.rows * self.cols * self.kind.coord_len() {
            return Err(Error::Format("coordinate count does not match the shape".into()));
        }
        match self.kind {
            ManifoldKind::Euclidean { dim } => self.to_image(&Euclidean::new(dim)?).map(drop),
            ManifoldKind::Sphere { ambient_dim } => self.to_image(&Sphere::new(ambient_dim)?).map(drop),
            ManifoldKind::Spd3 => self.to_image(&Spd3).map(drop),
        }
    }
}

pub fn write_dataset<W: Write>(d: &Dataset, mut w: W) -> Result<()> {
    writeln!(w, "{}", d.header())?;
    let mut buf = Vec::with_capacity(8 * d.coords.len());
    for c in &d.coords {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads and validates a dataset. Nothing is returned unless every cell
/// decodes.
pub fn read_dataset<R: Read>(r: R) -> Result<Dataset> {
    let mut r = BufReader::new(r);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::Format("missing header line".into()));
    }
    line.pop();
    let header = String::from_utf8(line).map_err(|_| Error::Format("header is not UTF-8".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::Format(format!("not a {MAGIC} dataset")));
    }
    let version = fields.get(1).copied().unwrap_or("");
    if version != VERSION {
        return Err(Error::VersionMismatch {
            found: version.to_string(),
            expected: VERSION.to_string(),
        });
    }
    if fields.len() != 6 {
        return Err(Error::Format(format!("header `{header}` needs 6 fields")));
    }
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Format(format!("bad number `{s}` in header")))
    };
    let kind = ManifoldKind::from_tag(fields[2], num(fields[3])?)?;
    let (rows, cols) = (num(fields[4])?, num(fields[5])?);
    if rows == 0 || cols == 0 {
        return Err(Error::Format("empty grid".into()));
    }
    let count = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(kind.coord_len()))
        .ok_or_else(|| Error::Format("grid too large".into()))?;
    let expected = count * 8;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(Error::TruncatedPayload {
            expected,
            actual: payload.len(),
        });
    }
    let coords = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    let d = Dataset {
        kind,
        rows,
        cols,
        coords,
    };
    d.validate()?;
    Ok(d)
}

pub fn save(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(d, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(fs::File::open(path)?)
}

pub fn save_image<M: Manifold>(m: &M, img: &Image<M::Point>, path: impl AsRef<Path>) -> Result<()> {
    save(&Dataset::from_image(m, img), path)
}

pub fn load_image<M: Manifold>(m: &M, path: impl AsRef<Path>) -> Result<Image<M::Point>> {
    load(path)?.to_image(m)
}

fn dwi_file(k: usize) -> String {
    format!("dwi_{k:03}.mrg")
}

/// Writes `directions.txt` and the per-direction images into `dir`.
pub fn save_dwi(stack: &DwiStack, dir: impl AsRef<Path>) -> Result<()> {
    stack.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut side = format!(
        "{DWI_MAGIC} {VERSION}\nb {}\na0 {}\ndirections {}\n",
        stack.b,
        stack.a0,
        stack.directions.len()
    );
    for v in &stack.directions {
        side.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
    }
    fs::write(dir.join(DIRECTIONS_FILE), side)?;
    let m = Euclidean::scalar();
    for (k, im) in stack.images.iter().enumerate() {
        let img = im.map(|&v| vec![v]);
        save_image(&m, &img, dir.join(dwi_file(k)))?;
    }
    Ok(())
}

pub fn load_dwi(dir: impl AsRef<Path>) -> Result<DwiStack> {
    let dir = dir.as_ref();
    let side_path = dir.join(DIRECTIONS_FILE);
    let side = fs::read_to_string(&side_path).map_err(|e| {
        Error::Format(format!("cannot read {}: {e}", side_path.display()))
    })?;
    let mut lines = side.lines().filter(|l| !l.trim().is_empty());
    let bad = |what: &str| Error::Format(format!("{DIRECTIONS_FILE}: {what}"));
    let head = lines.next().ok_or_else(|| bad("empty file"))?;
    let mut head = head.split_whitespace();
    if head.next() != Some(DWI_MAGIC) {
        return Err(bad("missing magic line"));
    }
    let version = head.next().unwrap_or("");
    if version != VERSION {
        return Err(Error::VersionMismatch {
            found: version.into(),
            expected: VERSION.into(),
        });
    }
    let mut keyed = |key: &str| -> Result<f64> {
        let line = lines.next().ok_or_else(|| bad(&format!("missing `{key}`")))?;
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(bad(&format!("expected `{key}` line")));
        }
        it.next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(&format!("bad value for `{key}`")))
    };
    let b = keyed("b")?;
    let a0 = keyed("a0")?;
    let count = keyed("directions")?;
    if count.fract() != 0.0 || count < 0.0 {
        return Err(bad("direction count must be a nonnegative integer"));
    }
    let count = count as usize;
    let mut directions = Vec::with_capacity(count);
    for line in lines {
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(&format!("bad direction `{line}`"))))
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(bad(&format!("direction `{line}` needs 3 components")));
        }
        directions.push(Vector3::new(v[0], v[1], v[2]));
    }
    if directions.len() != count {
        return Err(bad(&format!("declares {count} directions, lists {}", directions.len())));
    }
    if dir.join(dwi_file(count)).exists() {
        return Err(bad(&format!("more images than the {count} declared directions")));
    }
    let m = Euclidean::scalar();
    let images = (0..count)
        .map(|k| {
            let path = dir.join(dwi_file(k));
            if !path.exists() {
                return Err(bad(&format!("missing image {}", path.display())));
            }
            Ok(load_image(&m, path)?.map(|v| v[0]))
        })
        .collect::<Result<Vec<_>>>()?;
    let stack = DwiStack {
        directions,
        b,
        a0,
        images,
    };
    stack.validate()?;
    Ok(stack)
}
