#include <stdio.h>
#include "locillusion.h"

int main(void) {
    LiScenario *s = li_scenario_default();
    double k[8];
    double residual = 0.0;
    if (li_lqr_gain(s, k, &residual) != LI_STATUS_OK) {
        fprintf(stderr, "gain: %s\n", li_last_error_message());
        return 1;
    }
    LiTrajectory *t = NULL;
    if (li_run(s, &t) != LI_STATUS_OK) {
        fprintf(stderr, "run: %s\n", li_last_error_message());
        return 1;
    }
    LiTermination reason;
    li_trajectory_termination(t, &reason);
    LiStageRecord last;
    li_trajectory_stage(t, li_trajectory_len(t) - 1, &last);
    printf("%zu %d %.6f %.6f %.2f\n", li_trajectory_terminated_at(t), (int)reason,
           last.omega_r[0], last.omega_r[1], k[0]);
    li_trajectory_free(t);
    li_scenario_free(s);
    return 0;
}
