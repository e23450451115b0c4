use std::sync::Arc;

use super::calibration::DeviceNoiseModel;
use super::channel::{KrausChannel, depolarizing, thermal_relaxation};
use super::readout::ReadoutModel;
use super::NoiseError;
use crate::circuit::{Circuit, GateOp};

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleItem {
    Gate(GateOp),
    Channel {
        channel: Arc<KrausChannel>,
        qubits: Vec<usize>,
    },
}

/// A circuit with noise channels interleaved, plus the readout model used
/// when measuring its final state.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySchedule {
    num_qubits: usize,
    items: Vec<ScheduleItem>,
    readout: ReadoutModel,
}

impl NoisySchedule {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn items(&self) -> &[ScheduleItem] {
        &self.items
    }

    pub fn readout(&self) -> &ReadoutModel {
        &self.readout
    }

    /// The gate ops with every channel item removed.
    pub fn gate_ops(&self) -> Vec<&GateOp> {
        self.items
            .iter()
            .filter_map(|item| match item {
                ScheduleItem::Gate(op) => Some(op),
                ScheduleItem::Channel { .. } => None,
            })
            .collect()
    }

    pub fn channel_count(&self) -> usize {
        self.items.len() - self.gate_ops().len()
    }
}

/// Compiles `circuit` against `model`. Circuit qubit `i` is device qubit
/// `i`.
///
/// Every unitary gate is followed by a depolarizing channel on its
/// operands (strength = the calibrated gate error) and then by one thermal
/// relaxation channel per operand, using that gate's duration. Barriers
/// and measurements pass through without channels. Idle qubits accrue no
/// noise.
pub fn attach_noise(circuit: &Circuit, model: &DeviceNoiseModel) -> Result<NoisySchedule, NoiseError> {
    let n = circuit.num_qubits();
    if n > model.num_qubits() {
        return Err(NoiseError::TooManyQubits {
            circuit: n,
            device: model.num_qubits(),
        });
    }
    let mut items = Vec::with_capacity(circuit.len() * 3);
    for op in circuit.ops() {
        items.push(ScheduleItem::Gate(op.clone()));
        if !op.kind.is_unitary() {
            continue;
        }
        let noise = model.gate_noise(op.kind, &op.qubits)?;
        let depol = depolarizing(noise.error, op.qubits.len()).map_err(|e| NoiseError::Channel(Box::new(e)))?;
        items.push(ScheduleItem::Channel {
            channel: Arc::new(depol),
            qubits: op.qubits.clone(),
        });
        for &q in &op.qubits {
            let cal = model.qubits()[q];
            let thermal =
                thermal_relaxation(cal.t1_us, cal.t2_us, noise.duration_ns).map_err(|e| NoiseError::Channel(Box::new(e)))?;
            items.push(ScheduleItem::Channel {
                channel: Arc::new(thermal),
                qubits: vec![q],
            });
        }
    }
    Ok(NoisySchedule {
        num_qubits: n,
        items,
        readout: model.readout().truncated(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;
    use crate::noise::{GateNoise, QubitCalibration};

    fn model() -> DeviceNoiseModel {
        DeviceNoiseModel::uniform(
            3,
            QubitCalibration {
                t1_us: 50.0,
                t2_us: 40.0,
                readout_p01: 0.02,
                readout_p10: 0.01,
            },
            GateNoise { error: 0.01, duration_ns: 35.0 },
            GateNoise { error: 0.02, duration_ns: 300.0 },
        )
    }

    #[test]
    fn single_gate_structure() {
        let mut c = Circuit::new(1, "x");
        c.x(0).unwrap();
        let s = attach_noise(&c, &model()).unwrap();
        assert_eq!(s.items().len(), 3);
        assert!(matches!(&s.items()[0], ScheduleItem::Gate(op) if op.kind == GateKind::X));
        match &s.items()[1] {
            ScheduleItem::Channel { channel, qubits } => {
                assert_eq!(channel.operators().len(), 4);
                assert_eq!(qubits, &[0]);
            }
            other => panic!("expected depolarizing, got {other:?}"),
        }
        assert!(matches!(&s.items()[2], ScheduleItem::Channel { qubits, .. } if qubits == &[0]));
    }

    #[test]
    fn two_qubit_gate_gets_thermal_per_operand() {
        let mut c = Circuit::new(3, "cx");
        c.cx(2, 0).unwrap();
        let s = attach_noise(&c, &model()).unwrap();
        assert_eq!(s.items().len(), 4);
        let qubit_lists: Vec<Vec<usize>> = s.items()[1..]
            .iter()
            .map(|i| match i {
                ScheduleItem::Channel { qubits, .. } => qubits.clone(),
                _ => panic!(),
            })
            .collect();
        assert_eq!(qubit_lists, [vec![2, 0], vec![2], vec![0]]);
        assert_eq!(s.readout().num_qubits(), 3);
    }

    #[test]
    fn projection_recovers_circuit() {
        let mut c = Circuit::new(3, "p");
        c.h(0).unwrap().cx(0, 1).unwrap().barrier(&[0, 1, 2]).unwrap().rz(2, 0.3).unwrap();
        c.measure_all().unwrap();
        let s = attach_noise(&c, &model()).unwrap();
        let projected: Vec<GateOp> = s.gate_ops().into_iter().cloned().collect();
        assert_eq!(projected, c.ops());
        // h: 1+1, cx: 1+2, rz: 1+1
        assert_eq!(s.channel_count(), 7);
    }

    #[test]
    fn zero_noise_gives_identity_channels() {
        let mut c = Circuit::new(2, "z");
        c.h(0).unwrap().cx(0, 1).unwrap();
        let s = attach_noise(&c, &DeviceNoiseModel::ideal(2)).unwrap();
        for item in s.items() {
            if let ScheduleItem::Channel { channel, .. } = item {
                assert!(channel.is_identity());
            }
        }
        assert!(s.readout().is_ideal());
    }

    #[test]
    fn coverage_errors() {
        let mut c = Circuit::new(2, "u");
        c.h(0).unwrap();
        let one = DeviceNoiseModel::ideal(1);
        assert!(matches!(attach_noise(&c, &one), Err(NoiseError::TooManyQubits { .. })));

        let bare = DeviceNoiseModel::new(
            "bare",
            vec![
                QubitCalibration { t1_us: 1.0, t2_us: 1.0, readout_p01: 0.0, readout_p10: 0.0 };
                2
            ],
            vec![],
            None,
            None,
        )
        .unwrap();
        assert!(matches!(attach_noise(&c, &bare), Err(NoiseError::Uncovered { .. })));

        let mut toffoli = Circuit::new(3, "ccx");
        toffoli.apply(GateKind::Ccx, &[0, 1, 2], &[]).unwrap();
        assert!(matches!(
            attach_noise(&toffoli, &model()),
            Err(NoiseError::UnsupportedArity { arity: 3, .. })
        ));
    }
}
