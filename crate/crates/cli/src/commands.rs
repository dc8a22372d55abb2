//! The `adele-trace` command tree. Module commands are grouped by library
//! module; each leaf builds one [`Experiment`].

use crate::config::{ExperimentConfig, OutputPaths, DEFAULT_TOLERANCE};
use crate::experiment::*;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "adele-trace", version, about = "Numerical experiments on local fields, zeta zeros and cutoff traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Absolute tolerance passed to the numerical routines.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Seed for Monte-Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON run record here.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write the CSV breakdown here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Save the equivalent config file here before running.
    #[arg(long, global = true)]
    pub save_config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Local fields: modules, Fourier transforms, local zeta integrals.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Test functions: Mellin and Fourier transforms, reference functions.
    #[command(subcommand)]
    Testfn(TestfnCmd),
    /// Principal values at finite and archimedean places.
    #[command(subcommand)]
    Pv(PvCmd),
    /// The zeta function, its zeros and counting functions.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// The explicit formula: spectral and geometric sides.
    #[command(subcommand)]
    Explicit(ExplicitCmd),
    /// Cutoff traces at one place or over a finite set of places.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Prolate spheroidal spectra and gap probabilities.
    #[command(subcommand)]
    Prolate(ProlateCmd),
    /// Spectral statistics of the zeros.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Adelic summation: the E map and its Mellin transform.
    #[command(subcommand)]
    Adelic(AdelicCmd),
    /// Run an experiment described by a config file.
    Run { config: PathBuf },
    /// Run a named verification suite.
    Suite {
        /// One of pv-constants, explicit-formula, trace-ladder, prolate-plunge, stats, adelic.
        name: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum FieldCmd {
    /// The module |x| at a place.
    Module(ModuleArgs),
    /// Fourier transform of a locally constant function.
    Fourier(PadicFourierArgs),
    /// The local zeta integral of 1_{ℤ_p}.
    ZetaIntegral(LocalZetaArgs),
    /// Derivative of the homogeneous distribution paired with f.
    DeltaPrime(DeltaPrimeArgs),
}

#[derive(Subcommand, Debug)]
pub enum TestfnCmd {
    /// Mellin transform of a radial test function.
    Mellin(MellinArgs),
    /// Fourier transform of a Gaussian on the real line.
    Fourier(FourierRealArgs),
    /// The reference functions f0, f1, f2.
    Reference(ReferenceArgs),
}

#[derive(Subcommand, Debug)]
pub enum PvCmd {
    /// Principal value of a locally constant function.
    Finite(PvFiniteArgs),
    /// Principal value of ramified characters.
    Char(PvCharArgs),
    /// Principal value at the real place.
    Real(PvArchArgs),
    /// Principal value at the complex place.
    Complex(PvArchArgs),
    /// Effect of translating by λ on a principal value.
    Shift(PvShiftArgs),
}

#[derive(Subcommand, Debug)]
pub enum ZetaCmd {
    /// ζ(s) with a certified error bound.
    Value(ZetaArgs),
    /// Zeros on the critical line up to a height.
    Zeros(ZerosArgs),
    /// Smooth, oscillatory and exact zero counts.
    Count(CountArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExplicitCmd {
    /// Sum over zeros with tail bound.
    Spectral(SpectralArgs),
    /// Sum over places.
    Geometric(GeometricArgs),
    /// Both sides and their discrepancy.
    Compare(CompareArgs),
}

#[derive(Subcommand, Debug)]
pub enum TraceCmd {
    /// The symbol g attached to h.
    Symbol(SymbolArgs),
    /// Exact cutoff trace over ℚ_p.
    Padic(TracePadicArgs),
    /// Cutoff trace over ℝ along a ladder of Λ.
    Real(TraceRealArgs),
    /// Cutoff trace over a finite set of places.
    Slocal(TraceSLocalArgs),
}

#[derive(Subcommand, Debug)]
pub enum ProlateCmd {
    /// Spectrum of the cutoff operator at one Λ.
    Solve(ProlateSolveArgs),
    /// Plunge region across several Λ.
    Plunge(PlungeArgs),
    /// Gap probabilities E(k, s) of the sine kernel.
    Gap(GapArgs),
}

#[derive(Subcommand, Debug)]
pub enum StatsCmd {
    /// Semiclassical phase-space area.
    Semiclassical(SemiclassicalArgs),
    /// Unfolded zeros.
    Unfold(UnfoldArgs),
    /// Pair correlation histogram against GUE.
    PairCorr(PairCorrArgs),
    /// Limit of the shift-model trace.
    ShiftModel(ShiftModelArgs),
}

#[derive(Subcommand, Debug)]
pub enum AdelicCmd {
    /// E(f)(λ).
    EMap(EMapArgs),
    /// Residual of E(f)(λ) = E(f̂)(1/λ).
    FunctionalEquation(FunctionalEquationArgs),
    /// Mellin transform of E(f) against the L-function model.
    Mellin(AdelicMellinArgs),
}

/// What the command line asks for.
pub enum Invocation {
    Single(ExperimentConfig),
    Config(PathBuf),
    Suite(String),
}

impl Cli {
    pub fn invocation(self) -> Invocation {
        let experiment = match self.command {
            Command::Run { config } => return Invocation::Config(config),
            Command::Suite { name } => return Invocation::Suite(name),
            Command::Field(c) => match c {
                FieldCmd::Module(a) => Experiment::FieldModule(a),
                FieldCmd::Fourier(a) => Experiment::FieldFourier(a),
                FieldCmd::ZetaIntegral(a) => Experiment::FieldZetaIntegral(a),
                FieldCmd::DeltaPrime(a) => Experiment::FieldDeltaPrime(a),
            },
            Command::Testfn(c) => match c {
                TestfnCmd::Mellin(a) => Experiment::TestfnMellin(a),
                TestfnCmd::Fourier(a) => Experiment::TestfnFourier(a),
                TestfnCmd::Reference(a) => Experiment::TestfnReference(a),
            },
            Command::Pv(c) => match c {
                PvCmd::Finite(a) => Experiment::PvFinite(a),
                PvCmd::Char(a) => Experiment::PvChar(a),
                PvCmd::Real(a) => Experiment::PvReal(a),
                PvCmd::Complex(a) => Experiment::PvComplex(a),
                PvCmd::Shift(a) => Experiment::PvShift(a),
            },
            Command::Zeta(c) => match c {
                ZetaCmd::Value(a) => Experiment::ZetaValue(a),
                ZetaCmd::Zeros(a) => Experiment::ZetaZeros(a),
                ZetaCmd::Count(a) => Experiment::ZetaCount(a),
            },
            Command::Explicit(c) => match c {
                ExplicitCmd::Spectral(a) => Experiment::ExplicitSpectral(a),
                ExplicitCmd::Geometric(a) => Experiment::ExplicitGeometric(a),
                ExplicitCmd::Compare(a) => Experiment::ExplicitCompare(a),
            },
            Command::Trace(c) => match c {
                TraceCmd::Symbol(a) => Experiment::TraceSymbol(a),
                TraceCmd::Padic(a) => Experiment::TracePadic(a),
                TraceCmd::Real(a) => Experiment::TraceReal(a),
                TraceCmd::Slocal(a) => Experiment::TraceSlocal(a),
            },
            Command::Prolate(c) => match c {
                ProlateCmd::Solve(a) => Experiment::ProlateSolve(a),
                ProlateCmd::Plunge(a) => Experiment::ProlatePlunge(a),
                ProlateCmd::Gap(a) => Experiment::ProlateGap(a),
            },
            Command::Stats(c) => match c {
                StatsCmd::Semiclassical(a) => Experiment::StatsSemiclassical(a),
                StatsCmd::Unfold(a) => Experiment::StatsUnfold(a),
                StatsCmd::PairCorr(a) => Experiment::StatsPairCorr(a),
                StatsCmd::ShiftModel(a) => Experiment::StatsShiftModel(a),
            },
            Command::Adelic(c) => match c {
                AdelicCmd::EMap(a) => Experiment::AdelicEMap(a),
                AdelicCmd::FunctionalEquation(a) => Experiment::AdelicFunctionalEquation(a),
                AdelicCmd::Mellin(a) => Experiment::AdelicMellin(a),
            },
        };
        let output = (self.json.is_some() || self.csv.is_some()).then_some(OutputPaths { json: self.json, csv: self.csv });
        Invocation::Single(ExperimentConfig { tolerance: self.tolerance, seed: self.seed, output, experiment })
    }
}
