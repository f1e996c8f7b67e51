//! Generators for image requests.

#![allow(dead_code)]

use iiif_core::request::{Decimal, Format, ImageRequest, Quality, Region, Rotation, SizeKind, SizeSpec};
use proptest::prelude::*;

pub fn decimal(max_int: u64) -> impl Strategy<Value = Decimal> {
    (0..max_int, 0u32..4, 0u64..1000).prop_map(|(int, scale, frac)| {
        let frac = frac % 10u64.pow(scale);
        Decimal::new(int * 10u64.pow(scale) + frac, scale).unwrap()
    })
}

pub fn positive_decimal(max_int: u64) -> impl Strategy<Value = Decimal> {
    decimal(max_int).prop_filter("non-zero", |d| !d.is_zero())
}

pub fn region() -> impl Strategy<Value = Region> {
    prop_oneof![
        Just(Region::Full),
        Just(Region::Square),
        (0u32..5000, 0u32..5000, 1u32..5000, 1u32..5000).prop_map(|(x, y, w, h)| Region::Absolute { x, y, w, h }),
        (decimal(100), decimal(100), positive_decimal(200), positive_decimal(200))
            .prop_map(|(x, y, w, h)| Region::Percent { x, y, w, h }),
    ]
}

pub fn size() -> impl Strategy<Value = SizeSpec> {
    let kind = prop_oneof![
        Just(SizeKind::Max),
        (1u32..10_000).prop_map(|w| SizeKind::WidthOnly { w }),
        (1u32..10_000).prop_map(|h| SizeKind::HeightOnly { h }),
        positive_decimal(400).prop_map(|n| SizeKind::Percent { n }),
        (1u32..10_000, 1u32..10_000).prop_map(|(w, h)| SizeKind::Exact { w, h }),
        (1u32..10_000, 1u32..10_000).prop_map(|(w, h)| SizeKind::BestFit { w, h }),
    ];
    (kind, any::<bool>()).prop_map(|(kind, upscale)| SizeSpec { kind, upscale })
}

pub fn rotation() -> impl Strategy<Value = Rotation> {
    (decimal(360), any::<bool>()).prop_map(|(d, m)| Rotation::new(d, m).unwrap())
}

pub fn request() -> impl Strategy<Value = ImageRequest> {
    (
        "\\PC{1,12}",
        region(),
        size(),
        rotation(),
        proptest::sample::select(Quality::ALL.to_vec()),
        proptest::sample::select(Format::ALL.to_vec()),
    )
        .prop_map(|(identifier, region, size, rotation, quality, format)| ImageRequest {
            identifier,
            region,
            size,
            rotation,
            quality,
            format,
        })
}
