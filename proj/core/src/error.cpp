#include "rapido/error.hpp"

namespace rapido {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSnapshot: return "MalformedSnapshot";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::InfeasibleShape: return "InfeasibleShape";
    case ErrorCode::InsufficientBalance: return "InsufficientBalance";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::NoCandidatePath: return "NoCandidatePath";
    case ErrorCode::StaleRoute: return "StaleRoute";
    case ErrorCode::NoRoute: return "NoRoute";
    case ErrorCode::InvalidRoute: return "InvalidRoute";
    case ErrorCode::ZeroDeposit: return "ZeroDeposit";
    case ErrorCode::EmptySolution: return "EmptySolution";
    case ErrorCode::NoFeasibleSplit: return "NoFeasibleSplit";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::InsufficientOnChainFunds: return "InsufficientOnChainFunds";
    case ErrorCode::InvalidChannel: return "InvalidChannel";
    case ErrorCode::ChannelBusy: return "ChannelBusy";
    case ErrorCode::RouteInfeasible: return "RouteInfeasible";
    case ErrorCode::OutOfSequence: return "OutOfSequence";
    case ErrorCode::TimelockNotDecreasing: return "TimelockNotDecreasing";
    case ErrorCode::ContractMissing: return "ContractMissing";
    case ErrorCode::AlreadyTerminal: return "AlreadyTerminal";
    case ErrorCode::BadPreimage: return "BadPreimage";
    case ErrorCode::Expired: return "Expired";
    case ErrorCode::NotYetExpired: return "NotYetExpired";
    case ErrorCode::NotAborted: return "NotAborted";
    case ErrorCode::PaymentExceedsOutbound: return "PaymentExceedsOutbound";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::EmptyOutcomeSet: return "EmptyOutcomeSet";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace rapido
