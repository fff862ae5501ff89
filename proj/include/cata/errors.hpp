#pragma once

#include <stdexcept>
#include <string>

namespace cata {

// Base for all pipeline errors; `stage()` is filled in by the driver when it
// annotates a propagated failure.
class Error : public std::runtime_error {
public:
    explicit Error(std::string what) : std::runtime_error(std::move(what)) {}
};

#define CATA_DEFINE_ERROR(Name)                                    \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(std::string what) : Error(std::move(what)) {} \
    }

// survey-ingest
CATA_DEFINE_ERROR(DuplicateCell);
CATA_DEFINE_ERROR(MissingColumn);
CATA_DEFINE_ERROR(NonBinaryValue);
CATA_DEFINE_ERROR(UnknownLevel);
CATA_DEFINE_ERROR(ConflictingRules);
CATA_DEFINE_ERROR(AllColumnsRemoved);
CATA_DEFINE_ERROR(EmptyBrick);
CATA_DEFINE_ERROR(NonBinaryBrick);
CATA_DEFINE_ERROR(UnknownGroupKey);

// factor-core
CATA_DEFINE_ERROR(NonPositiveWeight);
CATA_DEFINE_ERROR(NonFiniteInput);

// correspondence
CATA_DEFINE_ERROR(DegenerateTable);
CATA_DEFINE_ERROR(ZeroProfile);
CATA_DEFINE_ERROR(DimensionMismatch);
CATA_DEFINE_ERROR(EmptyModel);

// mds
CATA_DEFINE_ERROR(AsymmetricInput);
CATA_DEFINE_ERROR(NegativeDistance);

// hca
CATA_DEFINE_ERROR(InvalidK);

// mfa
CATA_DEFINE_ERROR(DegenerateBlock);
CATA_DEFINE_ERROR(RowRegistryMismatch);
CATA_DEFINE_ERROR(FewerThanTwoBlocks);

// inference
CATA_DEFINE_ERROR(EmptyGroup);
CATA_DEFINE_ERROR(SpaceMismatch);
CATA_DEFINE_ERROR(GroupTooSmall);

// pipeline
CATA_DEFINE_ERROR(ConfigInvalid);
CATA_DEFINE_ERROR(DimensionOutOfRange);

#undef CATA_DEFINE_ERROR

}  // namespace cata
