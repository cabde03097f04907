//! JSON forms of frames and parallelepipeds:
//!
//! ```json
//! {"axes": [[1, 0], [0, 1]]}
//! {"frame": {"axes": [[1, 0], [0, 1]]}, "sides": [[0, 1], [2, 3]], "bounds": "half_open"}
//! ```
//!
//! Axis vectors are normalized on input. `frame` defaults to the standard
//! frame of the right dimension and `bounds` to `half_open`.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Bounds, Direction, Frame, Interval, Parallelepiped};

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    axes: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum BoundsRepr {
    HalfOpen,
    Closed,
    Open,
    LeftOpen,
}

impl From<Bounds> for BoundsRepr {
    fn from(b: Bounds) -> Self {
        match b {
            Bounds::HalfOpen => Self::HalfOpen,
            Bounds::Closed => Self::Closed,
            Bounds::Open => Self::Open,
            Bounds::LeftOpen => Self::LeftOpen,
        }
    }
}

impl From<BoundsRepr> for Bounds {
    fn from(b: BoundsRepr) -> Self {
        match b {
            BoundsRepr::HalfOpen => Self::HalfOpen,
            BoundsRepr::Closed => Self::Closed,
            BoundsRepr::Open => Self::Open,
            BoundsRepr::LeftOpen => Self::LeftOpen,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ParallelepipedRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<FrameRepr>,
    sides: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<BoundsRepr>,
}

fn frame_repr(f: &Frame) -> FrameRepr {
    FrameRepr { axes: f.axes().iter().map(|a| a.components().to_vec()).collect() }
}

fn frame_from_repr(r: FrameRepr) -> crate::Result<Frame> {
    let axes = r.axes.iter().map(|a| Direction::normalized(a)).collect::<crate::Result<Vec<_>>>()?;
    Frame::new(&axes)
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        frame_repr(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        frame_from_repr(FrameRepr::deserialize(d)?).map_err(de::Error::custom)
    }
}

impl Serialize for Parallelepiped {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let sides = self.sides();
        let bounds = sides[0].bounds;
        let uniform = sides.iter().all(|i| i.bounds == bounds);
        if !uniform {
            return Err(serde::ser::Error::custom("sides with mixed endpoint conventions"));
        }
        ParallelepipedRepr {
            frame: Some(frame_repr(&self.frame)),
            sides: sides.iter().map(|i| [i.lo, i.hi]).collect(),
            bounds: (bounds != Bounds::HalfOpen).then(|| bounds.into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Parallelepiped {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ParallelepipedRepr::deserialize(d)?;
        let frame = match r.frame {
            Some(f) => frame_from_repr(f).map_err(de::Error::custom)?,
            None => {
                super::check_dim(r.sides.len()).map_err(de::Error::custom)?;
                Frame::standard(r.sides.len())
            }
        };
        let bounds = r.bounds.map(Bounds::from).unwrap_or_default();
        let sides = r
            .sides
            .iter()
            .map(|[lo, hi]| Interval::with_bounds(*lo, *hi, bounds))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        Parallelepiped::new(frame, &sides).map_err(de::Error::custom)
    }
}
