#pragma once

namespace scada_ids {

/// Class label as seen by the learners and metrics.
using Label = int;

} // namespace scada_ids
