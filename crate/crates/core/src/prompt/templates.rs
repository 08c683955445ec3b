//! Fixed template text. Changing any constant here is a template revision:
//! bump TEMPLATE_VERSION so prompt hashes change with the text.

pub const TEMPLATE_VERSION: &str = "xlc-templates-v1";

pub const RCA_TASK_HEADER: &str = "-- Task Description:";

pub const RCA_ROLE_LINE: &str = "- You are dealing with root cause analysis for Azure cloud incident. You are an **on-call engineer** that is responsible for investigating the root cause.";

pub const RCA_METADATA_LINE: &str = "- You will be provided with title and summary of the incident along with the service name and its functionality that affected by the incident.";

pub const RCA_UPSTREAM_INTRO_LINE: &str = "- You will also be provided with a list of ** Upstream service dependencies** and their **Descriptions**";

pub const RCA_UPSTREAM_DEFINITION_LINE: &str = "- In the context of software engineering and system architecture, an upstream service dependency denotes a relationship between two services, where one service (the dependent service) relies on another service (the dependency) to fulfill its operational requirements. This dependency typically involves the exchange of data, execution of functions, or access to resources necessary for the dependent service to perform its intended tasks. This relationship is termed \"upstream\" to signify the flow of dependencies from the dependent service to its sources, akin to the flow of a river from its upstream source.";

pub const RCA_UPSTREAM_PURPOSE_LINE: &str = "- The Upstream service dependencies have been provided so that you can better identify the root cause of the incident.";

pub const RCA_EXAMPLES_HEADER: &str = "-- Historical Incident Examples:";

pub const RCA_EXAMPLES_INTRO_LINE: &str = "- Below are some historical incidents with their root causes. If you find the description and title to be **similar or relevant** to the current incident, you can also use the examples to determine the root cause of the current incident.";

pub const RCA_ANSWER_HEADER: &str = "-- Answering Format: Your output response should strictly be a **Json** file with the following two objectives:";

pub const RCA_OBJECTIVE1_LINE: &str = "Objective1: Infer and explain in detail, the Root cause that could have caused the incident";

pub const RCA_OBJECTIVE2_LINE: &str = "Objective2: Binary classification as follows: If and only if you identify the root cause as an upstream service dependency, return \"Yes\". Else, if the incident is **not** caused due to the failure of an upstream service, return \"No\"";

pub const RCA_DETAILS_HEADER: &str = "-- Incident Details:";

pub const RCA_UPSTREAM_HEADER: &str = "-- Upstream Service Dependencies:";

pub const RCA_NO_UPSTREAM_LINE: &str = "No known upstream dependencies.";

pub const MONITOR_TASK_HEADER: &str = "-- Task Description:";

/// `{class}` is replaced with "resource" or "SLO".
pub const MONITOR_ROLE_LINE: &str = "- You are an intelligent virtual assistant that answers questions from a user based on the monitor metadata provided. Go through monitor metadata {'Monitor Name', 'Account Name', 'namespace', 'Metric name', 'Sampling Type', 'Alert Title', 'Service Name'} , preprocess the text such as camel casing, snake case splitting, etc. and predict the {class} class of the monitor. Answer the following questions about the monitor sequentially.";

pub const MONITOR_Q1_LINE: &str = "1. Q1: Based on the monitor description, identify the underlying entity being tracked. Pay attention to features, internal functions, dependencies, datastores, or service level objectives.";

pub const MONITOR_Q2_LINE: &str = "2. Q2: Categorize the identified entity into a generic class:";

pub const MONITOR_GUIDANCE_HEADER: &str = "-- Additional Guidance :";

pub const MONITOR_GUIDANCE_1: &str = "- Focus on extracting relevant information from the descriptions.";

/// `{class}` is replaced with "resource" or "SLO".
pub const MONITOR_GUIDANCE_2: &str = "- Pay attention to specific features or characteristics indicative of the {class} class.";

pub const MONITOR_GUIDANCE_3: &str = "- Consider negations or exceptions in descriptions.";

pub const MONITOR_GUIDANCE_4: &str = "- Highlight the importance of understanding relationships between different elements.";

pub const MONITOR_METADATA_HEADER: &str = "-- Monitor Metadata:";

pub const MONITOR_SERVICE_HEADER: &str = "-- Service Description:";

pub const MONITOR_COMPONENTS_HEADER: &str = "-- Component Descriptions:";

pub const MONITOR_NO_SERVICE_DESCRIPTION_LINE: &str = "No service description is available.";

pub const MONITOR_NO_COMPONENTS_LINE: &str = "No component descriptions are available.";

/// Menu display forms for the default resource classes, keyed by the
/// normalized canonical label. Labels outside this table render as stored.
pub const RESOURCE_MENU_FORMS: [(&str, &str); 13] = [
    ("api", "api"),
    ("dependency", "dependency"),
    ("compute cluster", "compute cluster"),
    ("service level", "service level"),
    ("cache memory", "cache-memory"),
    ("ram memory", "ram-memory"),
    ("cpu", "CPU"),
    ("paging memory", "paging memory"),
    ("container", "container"),
    ("io", "IO"),
    ("storage", "Storage"),
    ("certificate", "certificate"),
    ("none of the above", "none-of-the-above"),
];
