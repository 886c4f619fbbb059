//! The branch-free direction classifier, visualized. Sweeps a gradient
//! vector around the circle, prints which of the eight sectors each
//! angle lands in, and confirms agreement with the conditional atan2
//! oracle away from sector boundaries.
//!
//!     cargo run --example direction_sectors

use edgepass::{classify_direction, direction_oracle};

fn arrow(dx: i32, dy: i32) -> &'static str {
    // +y points down, matching image coordinates.
    match (dx, dy) {
        (1, 0) => "->",
        (1, 1) => "\\v",
        (0, 1) => "v",
        (-1, 1) => "v/",
        (-1, 0) => "<-",
        (-1, -1) => "^\\",
        (0, -1) => "^",
        _ => "/^",
    }
}

fn main() {
    println!("angle sweep (image coordinates, +y down):");
    for deg in (0..360).step_by(15) {
        let rad = (deg as f32).to_radians();
        let (gx, gy) = (rad.cos(), rad.sin());
        let d = classify_direction(gx, gy);
        println!(
            "  {deg:>3} deg  g = ({gx:>6.3}, {gy:>6.3})  sector ({:>2}, {:>2}) {}",
            d.dx,
            d.dy,
            arrow(d.dx, d.dy)
        );
    }

    let mut agree = 0u32;
    let total = 100_000u32;
    let mut state = 0x243f_6a88_85a3_08d3u64;
    for _ in 0..total {
        // xorshift is plenty for a demo sweep.
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let gx = ((state >> 11) as f32 / (1u64 << 53) as f32) * 2.0 - 1.0;
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let gy = ((state >> 11) as f32 / (1u64 << 53) as f32) * 2.0 - 1.0;
        if gx == 0.0 && gy == 0.0 {
            continue;
        }
        if classify_direction(gx, gy) == direction_oracle(gx, gy).unwrap() {
            agree += 1;
        }
    }
    println!("\nrandom differential: {agree}/{total} agree with the atan2 oracle");
    println!("(boundary vectors resolve counterclockwise in both implementations;");
    println!("the zero gradient maps to (1, 0) by convention)");
}
