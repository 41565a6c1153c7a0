//! Row-major 2D grids and pixel-space points.

use serde::{Deserialize, Serialize};

/// A real-valued position in pixel coordinates. Origin is the center of the
/// top-left pixel, x grows rightward, y grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Index of the nearest integer pixel, or `None` if it falls outside a
    /// `width` x `height` frame. Halfway cases round away from zero.
    pub fn nearest_pixel(&self, width: u32, height: u32) -> Option<(u32, u32)> {
        let ix = self.x.round();
        let iy = self.y.round();
        if ix < 0.0 || iy < 0.0 || ix >= width as f64 || iy >= height as f64 {
            return None;
        }
        Some((ix as u32, iy as u32))
    }

    /// Clamp into the pixel-center span `[0, width-1] x [0, height-1]`.
    pub fn clamped(&self, width: u32, height: u32) -> Point {
        Point {
            x: self.x.clamp(0.0, (width - 1) as f64),
            y: self.y.clamp(0.0, (height - 1) as f64),
        }
    }
}

/// Dense row-major grid with `width * height` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(width: u32, height: u32, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    /// Wrap an existing row-major buffer. Panics if the length disagrees with
    /// the dimensions; callers construct the buffer, so that is a bug.
    pub fn from_vec(width: u32, height: u32, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            width as usize * height as usize,
            "grid buffer length must be width*height"
        );
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn idx(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> T {
        self.data[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: T) {
        let i = self.idx(x, y);
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn same_shape<U: Copy>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }
}
