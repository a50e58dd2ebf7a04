//! Exit codes and the mapping from library errors onto them.

use std::fmt;

use parabolic_iss::certificates::CertificateError;
use parabolic_iss::discrete_lemmas::LemmaError;
use parabolic_iss::fd_simulator::FdError;
use parabolic_iss::gains::GainError;
use parabolic_iss::norms::NormError;
use parabolic_iss::spectral::SpectralError;
use parabolic_iss::thermoelasticity::ThermoError;
use parabolic_iss::ExprError;

use crate::config::ConfigError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn hypothesis(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_HYPOTHESIS, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_NUMERICAL, message: message.into() }
    }

    fn with(code: i32, e: &impl fmt::Display) -> Failure {
        Failure { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::with(EXIT_CONFIG, &e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::config(format!("write failed: {e}"))
    }
}

fn expr_code(e: &ExprError) -> i32 {
    match e {
        ExprError::Domain(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn norm_code(e: &NormError) -> i32 {
    match e {
        NormError::NonFinite(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn spectral_code(e: &SpectralError) -> i32 {
    use SpectralError::*;
    match e {
        Expr(e) => expr_code(e),
        Norm(e) => norm_code(e),
        NoAdmissibleSlope { .. } | EtaInvalid(_) => EXIT_HYPOTHESIS,
        NotConverged(_) | IntegrationBlowUp(_) | Singular(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn gain_code(e: &GainError) -> i32 {
    use GainError::*;
    match e {
        Spectral(e) => spectral_code(e),
        Norm(e) => norm_code(e),
        NonPositiveEigenvalue { .. } | ZeroMargin(_) | L1Threshold { .. } => EXIT_HYPOTHESIS,
        _ => EXIT_CONFIG,
    }
}

fn fd_code(e: &FdError) -> i32 {
    use FdError::*;
    match e {
        Expr(e) => expr_code(e),
        Spectral(e) => spectral_code(e),
        Norm(e) => norm_code(e),
        BoundaryDenominator { .. } | NonMonotone { .. } | Diverged(_) | NoSteadyState(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Failure {
        Failure::with(spectral_code(&e), &e)
    }
}

impl From<GainError> for Failure {
    fn from(e: GainError) -> Failure {
        Failure::with(gain_code(&e), &e)
    }
}

impl From<FdError> for Failure {
    fn from(e: FdError) -> Failure {
        Failure::with(fd_code(&e), &e)
    }
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Failure {
        Failure::with(norm_code(&e), &e)
    }
}

impl From<CertificateError> for Failure {
    fn from(e: CertificateError) -> Failure {
        use CertificateError::*;
        let code = match &e {
            Fd(e) => fd_code(e),
            Gain(e) => gain_code(e),
            Spectral(e) => spectral_code(e),
            Norm(e) => norm_code(e),
            NonPositiveLambda(_) => EXIT_HYPOTHESIS,
            GridMismatch { .. } | EmptyTrajectory => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        Failure::with(code, &e)
    }
}

impl From<ThermoError> for Failure {
    fn from(e: ThermoError) -> Failure {
        use ThermoError::*;
        let code = match &e {
            Expr(e) => expr_code(e),
            Fd(e) => fd_code(e),
            Norm(e) => norm_code(e),
            NonFinite { .. } | SingularEndpoints(_) | Incompatible(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        Failure::with(code, &e)
    }
}

impl From<LemmaError> for Failure {
    fn from(e: LemmaError) -> Failure {
        Failure::with(EXIT_CONFIG, &e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(Failure::from(GainError::ZeroMargin(0.0)).code, EXIT_HYPOTHESIS);
        assert_eq!(Failure::from(FdError::Diverged(3)).code, EXIT_NUMERICAL);
        assert_eq!(Failure::from(FdError::LambdaFraction(2.0)).code, EXIT_CONFIG);
        assert_eq!(Failure::from(SpectralError::Singular(0.0)).code, EXIT_NUMERICAL);
        assert_eq!(Failure::from(CertificateError::NotDirichlet("L1_W")).code, EXIT_CONFIG);
        assert_eq!(Failure::from(ThermoError::SingularEndpoints(0.0)).code, EXIT_NUMERICAL);
    }
}
