//! Encodes one synthetic stride with all three encoders into 224x224x42
//! stacks and round-trips one through the `.gft` format.
//!
//! ```bash
//! cargo run --release -p gaitframe --example image_stack
//! ```

use gaitframe::dataset::{read_tensor, write_tensor};
use gaitframe::encoders::{encode_stride, EncoderConfig, Encoding};
use gaitframe::pipeline::segment_recording;
use gaitframe::synth::{generate_subject, GaitProfile};
use gaitframe::PipelineConfig;

fn main() -> gaitframe::Result<()> {
    let subject = generate_subject(&GaitProfile::robust(), 6, 11, "stack_demo")?;
    let seg = segment_recording(&subject.recording, &PipelineConfig::default())?;
    let stride = &seg.strides[2];
    println!(
        "stride {} spans {}..{} ({:.3} s)",
        stride.index,
        stride.start_idx,
        stride.end_idx,
        stride.duration_s()
    );

    let cfg = EncoderConfig::default();
    for enc in Encoding::ALL {
        let stack = encode_stride(stride, enc, &cfg)?;
        let t = &stack.tensor;
        let mean = t.data.iter().map(|&v| v as f64).sum::<f64>() / t.data.len() as f64;
        println!("{enc:<4} shape {:?} mean {mean:.4}", t.shape());
        if enc == Encoding::Gasf {
            let path = std::env::temp_dir().join("gaitframe-stack-demo.gft");
            write_tensor(&path, t)?;
            let back = read_tensor(&path)?;
            println!("     .gft round-trip identical: {}", back == *t);
        }
    }
    Ok(())
}
