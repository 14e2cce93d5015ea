//! Heatmap rendering of plane fields.

use std::io::Write;

use backscatter::geometry::{Shape, Vec3};
use backscatter::inversion::{IndicatorField, SamplingGrid};

use crate::{CliError, CliResult};

/// Polynomial fit of the viridis colormap.
const VIRIDIS: [[f64; 3]; 7] = [
    [0.2777273272234177, 0.005407344544966578, 0.3340998053353061],
    [0.1050930431085774, 1.404613529898575, 1.384590162594685],
    [-0.3308618287255563, 0.214847559468213, 0.09509516302823659],
    [-4.634230498983486, -5.799100973351585, -19.33244095627987],
    [6.228269936347081, 14.17993336680509, 56.69055260068105],
    [4.776384997670288, -13.74514537774601, -65.35303263337234],
    [-5.435455855934631, 4.645852612178535, 26.3124352495832],
];

pub fn viridis(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let mut rgb = [0u8; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        let v = VIRIDIS.iter().rev().fold(0.0, |acc, row| acc * t + row[c]);
        *out = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    }
    rgb
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn write_ppm<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)
    }

    #[cfg(feature = "png")]
    pub fn write_png<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(std::io::Error::other)?;
        w.write_image_data(&self.pixels).map_err(std::io::Error::other)?;
        w.finish().map_err(std::io::Error::other)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub invert: bool,
    pub overlay: Option<Shape>,
    /// Pixels per grid node along each axis.
    pub scale: usize,
}

/// Plane geometry of a field: node spacing and the in-plane axes.
struct PlaneFrame {
    axis: usize,
    value: f64,
    u: (f64, f64),
    v: (f64, f64),
    n: (usize, usize),
}

impl PlaneFrame {
    fn of(grid: &SamplingGrid) -> CliResult<Self> {
        match grid {
            SamplingGrid::Plane {
                axis,
                value,
                u_range,
                v_range,
                resolution,
            } => Ok(PlaneFrame {
                axis: *axis,
                value: *value,
                u: *u_range,
                v: *v_range,
                n: *resolution,
            }),
            g => Err(CliError::usage(format!("only plane fields can be rendered, got grid {g}"))),
        }
    }

    /// Point at image pixel `(px, py)` of a `scale`-times magnified image.
    /// Each node covers one cell centred on it; `py = 0` is the largest `v`.
    fn point(&self, px: usize, py: usize, scale: usize) -> Vec3 {
        let hu = (self.u.1 - self.u.0) / (self.n.0 - 1) as f64;
        let hv = (self.v.1 - self.v.0) / (self.n.1 - 1) as f64;
        let s = scale as f64;
        let u = self.u.0 - hu / 2.0 + (px as f64 + 0.5) * hu / s;
        let v = self.v.1 + hv / 2.0 - (py as f64 + 0.5) * hv / s;
        let (a, b) = match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut p = [0.0; 3];
        p[self.axis] = self.value;
        p[a] = u;
        p[b] = v;
        Vec3::from_array(p)
    }
}

/// Normalized values mapped through viridis; rows run from the largest
/// in-plane `v` downwards. A constant field renders as one colour.
pub fn render_field(field: &IndicatorField, opts: &RenderOptions) -> CliResult<Image> {
    let frame = PlaneFrame::of(&field.grid)?;
    let scale = opts.scale.max(1);
    let (nu, nv) = frame.n;
    let (lo, hi) = field
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let span = hi - lo;
    let (width, height) = (nu * scale, nv * scale);
    let mut pixels = Vec::with_capacity(3 * width * height);
    for py in 0..height {
        let j = nv - 1 - py / scale;
        for px in 0..width {
            let i = px / scale;
            let value = field.values[j * nu + i];
            let mut t = if span > 0.0 { (value - lo) / span } else { 0.0 };
            if opts.invert {
                t = 1.0 - t;
            }
            pixels.extend_from_slice(&viridis(t));
        }
    }
    let mut image = Image { width, height, pixels };
    if let Some(shape) = &opts.overlay {
        draw_outline(&mut image, &frame, scale, shape);
    }
    Ok(image)
}

/// Blackens inside pixels that touch an outside pixel.
fn draw_outline(image: &mut Image, frame: &PlaneFrame, scale: usize, shape: &Shape) {
    let (w, h) = (image.width, image.height);
    let inside: Vec<bool> = (0..w * h)
        .map(|i| shape.contains(frame.point(i % w, i / w, scale)))
        .collect();
    for y in 0..h {
        for x in 0..w {
            if !inside[y * w + x] {
                continue;
            }
            let edge = (x > 0 && !inside[y * w + x - 1])
                || (x + 1 < w && !inside[y * w + x + 1])
                || (y > 0 && !inside[(y - 1) * w + x])
                || (y + 1 < h && !inside[(y + 1) * w + x]);
            if edge {
                let i = 3 * (y * w + x);
                image.pixels[i..i + 3].copy_from_slice(&[0, 0, 0]);
            }
        }
    }
}

/// World point at the centre of an image pixel, for checking overlays.
pub fn pixel_point(grid: &SamplingGrid, scale: usize, px: usize, py: usize) -> CliResult<Vec3> {
    Ok(PlaneFrame::of(grid)?.point(px, py, scale.max(1)))
}
