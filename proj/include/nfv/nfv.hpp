#ifndef NFV_NFV_HPP
#define NFV_NFV_HPP

#include "amount.hpp"
#include "config.hpp"
#include "delay_cost.hpp"
#include "dqn.hpp"
#include "errors.hpp"
#include "ledger.hpp"
#include "mlp.hpp"
#include "outcome.hpp"
#include "placement.hpp"
#include "plot.hpp"
#include "policies.hpp"
#include "service.hpp"
#include "simulation.hpp"
#include "topology.hpp"

#endif // NFV_NFV_HPP
